use nalgebra::{Matrix2, Matrix3, Vector3};
use proptest::prelude::*;

use gdbench_core::gd::{
    discrete_params, kraus_gd, liouville_gd, liouville_pgd, BlochGenerator, LiouvilleChannel,
    PerturbedGdParams,
};
use gdbench_core::linalg::Complex64;
use gdbench_core::rb::{esum_from_observables, ideal_predictions, rb_observables};

/// Classical RK4 on ∂r/∂t = C·r + drive.
fn rk4(g: &BlochGenerator, r0: Vector3<f64>, t: f64, steps: usize) -> Vector3<f64> {
    let h = t / steps as f64;
    let f = |r: &Vector3<f64>| g.c * r + g.drive;
    let mut r = r0;
    for _ in 0..steps {
        let k1 = f(&r);
        let k2 = f(&(r + k1 * (h / 2.0)));
        let k3 = f(&(r + k2 * (h / 2.0)));
        let k4 = f(&(r + k3 * h));
        r += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    r
}

prop_compose! {
    fn perturbed()(
        g2p in 0.02f64..0.3,
        ratio in 0.0f64..0.5,
        lambda in 0.5f64..=1.0,
        a in prop::array::uniform4(-2e-3f64..2e-3),
    ) -> PerturbedGdParams {
        PerturbedGdParams::from_total_dephasing(g2p, g2p * ratio, lambda)
            .unwrap()
            .with_perturbation(a[0], a[1], a[2], a[3])
            .unwrap()
    }
}

fn max_abs(m: impl IntoIterator<Item = f64>) -> f64 {
    m.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn semigroup(p in perturbed(), t1 in 0.05f64..5.0, t2 in 0.05f64..5.0) {
        let ab = liouville_pgd(&p, t1).unwrap().compose(&liouville_pgd(&p, t2).unwrap());
        let direct = liouville_pgd(&p, t1 + t2).unwrap();
        prop_assert!(max_abs((ab.matrix() - direct.matrix()).iter().copied()) < 1e-10);
    }

    #[test]
    fn evolution_matches_ode(p in perturbed(), t in 0.1f64..20.0, r in prop::array::uniform3(-0.57f64..0.57)) {
        let g = BlochGenerator::from_params(&p);
        let r0 = Vector3::from(r);
        let exact = g.evolve(&r0, t);
        let numeric = rk4(&g, r0, t, 4000);
        prop_assert!((exact - numeric).amax() < 1e-8, "{exact} vs {numeric}");
    }

    #[test]
    fn channel_reproduces_evolution(p in perturbed(), t in 0.1f64..10.0, r in prop::array::uniform3(-0.57f64..0.57)) {
        let r0 = Vector3::from(r);
        let via_channel = liouville_pgd(&p, t).unwrap().apply_bloch(&r0);
        let via_generator = BlochGenerator::from_params(&p).evolve(&r0, t);
        prop_assert!((via_channel - via_generator).amax() < 1e-12);
    }

    #[test]
    fn kraus_matches_liouville(g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0, lambda in 0.5f64..=1.0,
                               r in prop::array::uniform3(-0.57f64..0.57)) {
        let k = kraus_gd(g1, g2, lambda).unwrap();
        let id = max_abs((k.completeness() - Matrix2::identity()).iter().map(|c| c.norm()));
        prop_assert!(id < 1e-12);

        let gd = liouville_gd(g1, g2, lambda).unwrap();
        prop_assert!(max_abs((k.liouville().unwrap().matrix() - gd.matrix()).iter().copied()) < 1e-12);

        let half = Complex64::new(0.5, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rho = Matrix2::new(
            half * (1.0 + r[2]), half * (r[0] - i * r[1]),
            half * (r[0] + i * r[1]), half * (1.0 - r[2]),
        );
        let out = k.apply(&rho);
        let rb = gd.apply_bloch(&Vector3::from(r));
        prop_assert!((out[(0, 1)].re * 2.0 - rb[0]).abs() < 1e-12);
        prop_assert!((out[(1, 0)].im * 2.0 - rb[1]).abs() < 1e-12);
        prop_assert!(((out[(0, 0)] - out[(1, 1)]).re - rb[2]).abs() < 1e-12);
    }

    #[test]
    fn esum_identity_on_unital_perturbations(
        g1 in 0.0f64..0.2, g2 in 0.0f64..0.2, lambda in 0.5f64..=1.0,
        e in prop::array::uniform9(-0.02f64..0.02),
    ) {
        let gd = liouville_gd(g1, g2, lambda).unwrap();
        let e = Matrix3::from_row_slice(&e);
        let ch = LiouvilleChannel::from_parts(&(gd.unital() + e), &gd.nonunital());
        let esum = esum_from_observables(&rb_observables(&ch), &ideal_predictions(g1, g2).unwrap(), g1, g2);
        prop_assert!((esum - e.norm_squared()).abs() < 1e-12);
    }
}

#[test]
fn unperturbed_channel_is_gd_at_discrete_rates() {
    let p = PerturbedGdParams::ideal(0.03, 0.07, 0.85).unwrap();
    let (g1, g2) = discrete_params(p.gamma1, p.gamma2, 1.5).unwrap();
    let a = liouville_pgd(&p, 1.5).unwrap();
    let b = liouville_gd(g1, g2, p.lambda).unwrap();
    assert!(max_abs((a.matrix() - b.matrix()).iter().copied()) < 1e-14);
}
