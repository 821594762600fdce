use super::*;
use crate::dynamics::{solve_nls, EquationSpec, StepPolicy};
use crate::spectral::{l2_norm, make_grid, project_high, sobolev_norm};
use std::f64::consts::PI;

#[test]
fn gaussian_norm_and_spectrum() {
    let g = make_grid(2, 24.0, 64).unwrap();
    let w = 1.3;
    let f = gaussian(&g, 0.8, w, &[]).unwrap();
    // ∫ e^{-|x|²/w²} = π w² in d = 2
    let exact = 0.8 * (PI * w * w).sqrt();
    assert!((l2_norm(&f) - exact).abs() < 1e-10 * exact);
    let c = f.fourier_values();
    let imax = (0..c.len()).max_by(|a, b| c[*a].norm().total_cmp(&c[*b].norm())).unwrap();
    assert_eq!(imax, 0);
    assert_eq!(l2_norm(&gaussian(&g, 0.0, 1.0, &[]).unwrap()), 0.0);
    assert!(gaussian(&g, 1.0, 8.0, &[]).is_err());
}

#[test]
fn annulus_profile_facts() {
    let g = make_grid(2, 16.0, 256).unwrap();
    let d = chirped_annulus(&g, 1.0, 1.0, 0.0, 0.1).unwrap();
    let sup = d.profile.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!((sup - 1.0).abs() < 0.1, "{sup}");
    let e = chirped_annulus(&g, 1.0, 1.0, 0.7, 0.1).unwrap();
    for (a, b) in d.v0.values().iter().zip(e.v0.values()) {
        assert!((a.norm() - b.norm()).abs() < 1e-14);
    }
}

#[test]
fn annulus_lr_scaling() {
    // ‖f‖_{L^r} ~ a0^{-1 + d/r}, d = 2
    let g = make_grid(2, 16.0, 512).unwrap();
    for r in [2.0, 4.0] {
        let norms: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&a| crate::spectral::lp_norm(&chirped_annulus(&g, 1.0, a, 0.0, 0.1).unwrap().profile, r))
            .collect();
        let want = -1.0 + 2.0 / r;
        for w in norms.windows(2) {
            let slope = (w[1] / w[0]).ln() / 2f64.ln();
            assert!((slope - want).abs() < 0.05, "r = {r}: {slope} vs {want}");
        }
    }
}

#[test]
fn annulus_rejects_oversized() {
    let g = make_grid(2, 8.0, 64).unwrap();
    assert!(chirped_annulus(&g, 0.1, 2.0, 0.1, 0.1).is_err());
    let w = chirped_annulus(&g, 0.1, 1.0, 0.1, 0.0).unwrap().warnings;
    assert!(w.iter().any(|m| m.contains("Gibbs")));
}

#[test]
fn defect_functional_cases() {
    let g = make_grid(2, 16.0, 128).unwrap();
    let z = SpectralField::zeros(&g, Frame::Modulated);
    let v1 = gaussian(&g, 0.7, 1.0, &[]).unwrap().with_frame(Frame::Modulated);
    let d = defect_functional(&z, &v1).unwrap();
    assert!((d - 2.0 * l2_norm(&v1)).abs() < 1e-12);

    let (delta0, b0) = (0.3, 0.4);
    let data = chirped_annulus(&g, delta0, 1.0, b0, 0.1).unwrap();
    let f3 = data.profile.map_physical(|x| x * x * x);
    let lower = 0.25 * delta0.powi(3) * l2_norm(&f3);
    let val = defect_functional(&data.v0, &z).unwrap();
    assert!(val >= lower, "{val} < {lower}");
    // doubling b₀ keeps |v₀| and hence the lower bound; the value stays above it
    let twice = chirped_annulus(&g, delta0, 1.0, 2.0 * b0, 0.1).unwrap();
    let f3b = twice.profile.map_physical(|x| x * x * x);
    assert_eq!(l2_norm(&f3b), l2_norm(&f3));
    assert!(defect_functional(&twice.v0, &z).unwrap() >= lower);

    // v₁ whose real part cancels the cubic terms
    let i = Complex64::i();
    let cancel = data.v0.map_physical(|v| {
        let c = v.conj();
        let t = 0.5 * i * v * v * v - 0.25 * i * c * c * c;
        Complex64::new(0.5 * t.re, 0.0)
    });
    let rest = defect_functional(&data.v0, &cancel).unwrap();
    let im: f64 = data
        .v0
        .values()
        .iter()
        .map(|v| {
            let c = v.conj();
            (0.5 * i * v * v * v - 0.25 * i * c * c * c).im.powi(2)
        })
        .sum::<f64>();
    assert!((rest - (im * g.cell_volume()).sqrt()).abs() < 1e-12);
}

#[test]
fn defect_cubic_phase_invariance() {
    let g = make_grid(1, 16.0, 128).unwrap();
    let v0 = chirped_annulus(&g, 0.5, 1.0, 0.3, 0.1).unwrap().v0;
    let z = SpectralField::zeros(&g, Frame::Modulated);
    let base = defect_functional(&v0, &z).unwrap();
    for k in 1..3 {
        let th = 2.0 * PI * k as f64 / 3.0;
        let rot = v0.scale(Complex64::from_polar(1.0, th));
        assert!((defect_functional(&rot, &z).unwrap() - base).abs() < 1e-12 * base);
    }
}

#[test]
fn chirp_raises_sobolev_norms() {
    let g = make_grid(2, 16.0, 256).unwrap();
    let h1: Vec<f64> = [0.1, 0.5, 1.0]
        .iter()
        .map(|&b| sobolev_norm(&chirped_annulus(&g, 0.5, 1.0, b, 0.1).unwrap().v0, 1.0, false))
        .collect();
    assert!(h1[0] < h1[1] && h1[1] < h1[2]);
}

#[test]
fn rough_profile_is_real_even_and_finite() {
    let g = make_grid(1, 64.0, 1024).unwrap();
    let v = rough_sobolev(&g, 1.0, 2.0).unwrap();
    let vals = v.values();
    let n = vals.len();
    for j in 1..n {
        assert!((vals[j] - vals[n - j]).norm() < 1e-12);
        assert_eq!(vals[j].im, 0.0);
    }
    let coarse = sobolev_norm(&v, 2.0, false);
    let fine = sobolev_norm(&rough_sobolev(&make_grid(1, 128.0, 2048).unwrap(), 1.0, 2.0).unwrap(), 2.0, false);
    assert!((coarse - fine).abs() < 0.01 * fine, "{coarse} {fine}");
    let tails: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|&n| l2_norm(&project_high(&v, n).unwrap())).collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]));
    assert!(rough_sobolev(&g, 1.0, 5.0).is_err());
}

#[test]
fn lowpass_cutoff_rule_and_tail_bound() {
    let g = make_grid(1, 64.0, 1024).unwrap();
    let v = rough_sobolev(&g, 1.0, 2.0).unwrap();
    // ε = 1/8, T = 4 gives N = 2
    let p = lowpass_data(&v, 0.125, 4.0).unwrap();
    assert!(l2_norm(&p.sub(&project_low(&v, 2.0).unwrap()).unwrap()) == 0.0);
    let n: f64 = 2.0;
    let tail = l2_norm(&v.sub(&p).unwrap());
    assert!(tail <= n.powf(-2.0) * sobolev_norm(&v, 2.0, false));
    assert!(lowpass_data(&v, 1.0, 1.0).is_ok());
    assert!(lowpass_data(&v, 0.5, 8.0).is_err());
}

#[test]
fn lens_reduces_to_identity_at_t0() {
    let g = make_grid(1, 32.0, 256).unwrap();
    let f = gaussian(&g, 1.0, 1.0, &[]).unwrap();
    let b = 4.0;
    let out = lens_transform_exact(&f, LensParams { b, t: 0.0 }).unwrap();
    let chirped = SpectralField::from_fn(&g, Frame::Original, |x| {
        Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), -0.5 * b * x[0] * x[0])
    });
    assert!(l2_norm(&out.sub(&chirped).unwrap()) < 1e-12);
    let p = LensParams { b: 1.0, t: 1.0 };
    assert_eq!(p.dilation().powf(-0.5), 2f64.powf(-0.5));
}

#[test]
fn lens_matches_free_flow() {
    let g = make_grid(1, 32.0, 512).unwrap();
    let f = gaussian(&g, 1.0, 1.0, &[]).unwrap().with_frame(Frame::Modulated);
    let b = 4.0;
    let chirped = SpectralField::from_fn(&g, Frame::Modulated, |x| {
        Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), -0.5 * b * x[0] * x[0])
    });
    let times = [0.1, 0.25];
    let traj = solve_nls(&chirped, &EquationSpec::nls(0.0), &times, &StepPolicy::strang(0.01)).unwrap();
    for s in &traj.samples {
        let lens = lens_transform_exact(&f, LensParams { b, t: s.time }).unwrap();
        let d = l2_norm(&lens.sub(&s.field).unwrap());
        assert!(d < 1e-8, "t = {}: {d}", s.time);
    }
}

#[test]
fn build_relations() {
    let g = make_grid(1, 32.0, 256).unwrap();
    let spec = DataSpec::new(DataFamily::Gaussian);
    let d = spec.build(&g, 3.0).unwrap();
    let back = crate::limits::compatible_v0(&d.u0, &d.u1).unwrap();
    assert!(l2_norm(&back.sub(&d.v0).unwrap()) < 1e-15);
    assert!(d.half_box_leak < 1e-10);
    let mut s = DataSpec::new(DataFamily::Gaussian);
    s.v1 = V1Preset::NlsAligned;
    let d = s.build(&g, 3.0).unwrap();
    // -2 Re v₁ equals the NLS remainder velocity
    let r1 = crate::limits::nls_remainder_initial_velocity(&d.v0, 3.0);
    let m2re = d.v1.map_physical(|z| Complex64::new(-2.0 * z.re, 0.0));
    assert!(l2_norm(&m2re.sub(&r1).unwrap()) < 1e-12);
}
