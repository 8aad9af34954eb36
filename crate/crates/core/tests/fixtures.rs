mod common;

use std::collections::BTreeSet;

use common::{fixture, fixture_path};
use qcdist::binary::SparseBinaryMatrix;
use qcdist::bound::{bound_eq1, Form};
use qcdist::qc::{parse_qcmat, render_qcmat, PolyMatrix, Rate};

const ALL: [&str; 9] = [
    "80211ad_r1_2.qcmat",
    "80211ad_r5_8.qcmat",
    "80211ad_r3_4.qcmat",
    "80211ad_r13_16.qcmat",
    "80211n_1944_r1_2.qcmat",
    "80211n_1944_r2_3.qcmat",
    "80211n_1944_r3_4.qcmat",
    "80211n_1944_r5_6.qcmat",
    "802153c_r14_15.qcmat",
];

#[test]
fn every_fixture_is_consistent_and_cites_a_source() {
    for name in ALL {
        let (h, info) = fixture(name);
        let text = std::fs::read_to_string(fixture_path(name)).unwrap();
        assert!(info.extra.get("source").is_some_and(|s| s.contains("IEEE Std")), "{name}");
        assert_eq!(info.block_length, Some(h.block_length()), "{name}");
        let (r, k) = (info.rate.unwrap(), info.info_length.unwrap());
        assert_eq!(k, h.block_length() - h.check_length(), "{name}");
        assert!(r.same_value(k as u64, h.block_length() as u64));
        let (again, info2) = parse_qcmat(&render_qcmat(&h, &info)).unwrap();
        assert_eq!((again, info2), (h.clone(), info), "{name}");
        assert!(text.lines().count() > h.rows());
    }
}

#[test]
fn standard_dimensions() {
    let dims = |name: &str| {
        let (h, info) = fixture(name);
        (h.order(), h.rows(), h.cols(), info.rate.unwrap())
    };
    let rate = |num, den| Rate { num, den };
    assert_eq!(dims("80211ad_r1_2.qcmat"), (42, 8, 16, rate(1, 2)));
    assert_eq!(dims("80211ad_r5_8.qcmat"), (42, 6, 16, rate(5, 8)));
    assert_eq!(dims("80211ad_r3_4.qcmat"), (42, 4, 16, rate(3, 4)));
    assert_eq!(dims("80211ad_r13_16.qcmat"), (42, 3, 16, rate(13, 16)));
    assert_eq!(dims("80211n_1944_r1_2.qcmat"), (81, 12, 24, rate(1, 2)));
    assert_eq!(dims("80211n_1944_r2_3.qcmat"), (81, 8, 24, rate(2, 3)));
    assert_eq!(dims("80211n_1944_r3_4.qcmat"), (81, 6, 24, rate(3, 4)));
    assert_eq!(dims("80211n_1944_r5_6.qcmat"), (81, 4, 24, rate(5, 6)));
    assert_eq!(dims("802153c_r14_15.qcmat"), (96, 1, 15, rate(14, 15)));
}

#[test]
fn weight_matrices_of_fixtures() {
    // circulant permutations or empty blocks everywhere except 802.15.3c
    for name in &ALL[..8] {
        let a = fixture(name).0.weight_matrix();
        assert!(a.entries().iter().all(|&w| w <= 1), "{name}");
    }
    let a = fixture("802153c_r14_15.qcmat").0.weight_matrix();
    assert!(a.entries().iter().all(|&w| w == 3));
}

#[test]
fn expansion_invariants_on_fixtures() {
    for name in ALL {
        let (h, _) = fixture(name);
        let b = h.expand();
        let a = h.weight_matrix();
        assert_eq!((b.rows(), b.cols()), (h.check_length(), h.block_length()));
        assert_eq!(b.count_ones() as u64, h.order() as u64 * a.total(), "{name}");
        for i in 0..h.cols() {
            for c in 0..h.order() {
                assert_eq!(b.col(i * h.order() + c).len() as u64, a.column_sum(i));
            }
        }
        let back = SparseBinaryMatrix::from_alist(&b.to_alist()).unwrap();
        assert_eq!(back, b, "{name}");
    }
}

#[test]
fn quick_fixture_bounds() {
    let bound = |name: &str| bound_eq1(&fixture(name).0.weight_matrix(), &BTreeSet::new(), Form::Sum).unwrap().bound;
    assert_eq!(bound("802153c_r14_15.qcmat"), Some(6));
    assert_eq!(bound("80211ad_r13_16.qcmat"), Some(8));
    assert_eq!(bound("80211ad_r3_4.qcmat"), Some(13));
}

#[test]
fn scaled_fixture_keeps_its_weight_matrix() {
    let text = std::fs::read_to_string(fixture_path("80211n_1944_r5_6.qcmat")).unwrap();
    let (table, _) = qcdist::qc::parse_qcmat_table(&text).unwrap();
    let base: PolyMatrix = table.to_poly_matrix();
    for target in [27, 54] {
        for mode in [qcdist::qc::ScaleMode::Proportional, qcdist::qc::ScaleMode::Modulo] {
            let scaled = table.scale(target, mode).unwrap().to_poly_matrix();
            assert_eq!(scaled.order(), target);
            assert_eq!(scaled.weight_matrix(), base.weight_matrix());
        }
    }
}
