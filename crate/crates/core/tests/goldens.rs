//! Values recomputed at 40 digits with an independent arbitrary-precision
//! script, then frozen.

#![allow(clippy::excessive_precision)]

use ostrowski_core::funcspace::catalog_entry;
use ostrowski_core::ostrowski::lhs_deviation;
use ostrowski_core::pdfapp::{distribution, pdf_bound_thm3, pdf_bound_thm4};
use ostrowski_core::psibounds::{bound_corollary_m, bound_theorem1, bound_theorem2, psi1, psi2};
use ostrowski_core::quadrature::{em_bound_prop1, em_bound_prop2, midpoint_sum, uniform_partition};
use ostrowski_core::{BoundVariant, ConvexityOrder, HolderPair, Interval, Tau};

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn assert_golden(got: f64, want: f64) {
    assert!((got - want).abs() <= 4e-16 * want.abs().max(1.0), "got {got:e}, want {want:e}");
}

#[test]
fn kernels() {
    let one = ConvexityOrder::one();
    let pq = HolderPair::from_q(2.0).unwrap();
    let inv_e = Tau::new((-1.0_f64).exp()).unwrap();
    let half = Tau::new(0.5).unwrap();
    assert_golden(psi1(half, one, unit(), 0.5).unwrap().value, 0.178_553_230_267_612_29);
    assert_golden(psi1(inv_e, one, unit(), 0.5).unwrap().value, 0.154_818_121_746_175_47);
    assert_golden(psi2(half, one, pq, unit(), 0.5).unwrap().value, 0.362_470_751_170_310_99);
    assert_golden(psi2(inv_e, one, pq, unit(), 0.5).unwrap().value, 0.319_322_105_785_423_44);
    let iv = Interval::new(0.0, 2.0).unwrap();
    let s = ConvexityOrder::new(0.5).unwrap();
    assert_golden(psi1(Tau::new(0.9).unwrap(), s, iv, 1.5).unwrap().value, 0.609_854_771_447_800_7);
}

#[test]
fn bounds_for_exp() {
    let exp1 = catalog_entry("exp1").unwrap();
    let one = ConvexityOrder::one();
    assert_golden(bound_theorem1(&exp1, unit(), 0.5, one).unwrap(), 0.420_839_287_058_788_94);
    assert_golden(bound_theorem1(&exp1, unit(), 0.0, one).unwrap(), 0.718_281_828_459_045_2);
    let pq = HolderPair::from_q(2.0).unwrap();
    assert_golden(bound_theorem2(&exp1, unit(), 0.5, one, pq).unwrap(), 0.501_144_350_840_456_5);
    assert_golden(lhs_deviation(&exp1, unit(), 0.5).unwrap().0, 0.069_560_557_758_917_09);
    assert_golden(bound_corollary_m(0.5, unit(), 0.5, one, BoundVariant::Thm1).unwrap(), 0.089_276_615_133_806_14);
}

#[test]
fn composite_midpoint() {
    let exp1 = catalog_entry("exp1").unwrap();
    let one = ConvexityOrder::one();
    let d = uniform_partition(unit(), 2).unwrap();
    assert_golden(midpoint_sum(&exp1, &d), 1.700_512_716_650_208_1);
    let p1 = em_bound_prop1(&exp1, &d, one).unwrap();
    assert_golden(p1.per_interval[0].psi, 0.097_858_187_139_647_37);
    assert_golden(p1.bound, 0.427_347_006_516_938_4);
    assert_golden(p1.weighted_bound, 0.213_673_503_258_469_2);
    assert_golden(p1.true_error.unwrap(), 0.017_769_111_808_837_16);
    let p2 = em_bound_prop2(&exp1, &d, one, HolderPair::from_q(2.0).unwrap()).unwrap();
    assert_golden(p2.bound, 0.497_313_952_843_808_4);
}

#[test]
fn truncated_exponential() {
    let t = distribution("texp1").unwrap();
    let one = ConvexityOrder::one();
    assert_golden(t.expectation, 0.581_976_706_869_326_4);
    assert_golden(t.cdf_at(0.5), 0.377_540_668_798_145_44);
    let r = pdf_bound_thm3(&t, 0.5, one).unwrap();
    assert_golden(r.lhs, 0.040_482_624_332_528_14);
    assert_golden(r.rhs, 0.244_918_662_403_709_13);
    let r = pdf_bound_thm4(&t, 0.5, one, HolderPair::from_q(2.0).unwrap()).unwrap();
    assert_golden(r.rhs, 0.291_654_338_968_295_2);
}

#[test]
fn long_interval_certificate() {
    // One subinterval of length 4: the unweighted sum undershoots the error.
    let exp1 = catalog_entry("exp1").unwrap();
    let d = uniform_partition(Interval::new(0.0, 4.0).unwrap(), 1).unwrap();
    let c = em_bound_prop1(&exp1, &d, ConvexityOrder::one()).unwrap();
    let err = c.true_error.unwrap();
    assert!(c.bound < err && err <= c.weighted_bound);
    assert!(!c.unweighted_form_valid());
}
