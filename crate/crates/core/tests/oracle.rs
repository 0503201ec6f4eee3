//! The generic harmonic-map residual and energy-momentum tensor against the
//! field equations and closed-form tensors written out by hand here.

use geodesy_core::engine::{el_residual, emt};
use geodesy_core::models::axisym::{self, AxisymFields};
use geodesy_core::models::er::{self, ErFields};
use geodesy_core::models::gowdy::GowdyFields;
use geodesy_core::verify::{self, Model};
use geodesy_core::{FieldMap, GridSpec, Patch};
use ndarray::Array2;

const TOL: f64 = 1e-12;

/// Central differences in weighted-sum form, wrapping along axis 1 when it
/// is periodic. At τ ≈ 8 the Gowdy fields are O(5) on h ≈ 1/63, so a
/// differently ordered stencil alone would disagree at ε|X|/h² ≈ 4e-12; the
/// equations are what this file checks independently.
struct Fd<'a> {
    grid: &'a GridSpec,
}

impl Fd<'_> {
    fn at(&self, a: &Array2<f64>, i: isize, j: isize) -> f64 {
        let g = self.grid;
        let j = if g.periodic[1] { j.rem_euclid(g.dims[1] as isize - 1) } else { j };
        a[[i as usize, j as usize]]
    }
    fn d(&self, a: &Array2<f64>, axis: usize, i: usize, j: usize) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let (p, m) = if axis == 0 {
            (self.at(a, i + 1, j), self.at(a, i - 1, j))
        } else {
            (self.at(a, i, j + 1), self.at(a, i, j - 1))
        };
        let w = 0.5 / self.grid.spacing[axis];
        0.0 + -w * m + w * p
    }
    fn dd(&self, a: &Array2<f64>, axis: usize, i: usize, j: usize) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let (p, m) = if axis == 0 {
            (self.at(a, i + 1, j), self.at(a, i - 1, j))
        } else {
            (self.at(a, i, j + 1), self.at(a, i, j - 1))
        };
        let h2 = self.grid.spacing[axis] * self.grid.spacing[axis];
        0.0 + (1.0 / h2) * m + (-2.0 / h2) * self.at(a, i, j) + (1.0 / h2) * p
    }
}

fn compare(generic: &[Patch], sign: f64, oracle: impl Fn(usize, usize) -> [f64; 2]) -> f64 {
    let mut worst = 0.0f64;
    for (i, j) in generic[0].region.iter() {
        let o = oracle(i, j);
        for c in 0..2 {
            worst = worst.max((generic[c].at(i, j) - sign * o[c]).abs());
        }
    }
    worst
}

fn axisym_data() -> AxisymFields {
    AxisymFields::from_fns(
        verify::axisym_window(verify::ORACLE_N).unwrap(),
        |p| (2.0 * axisym::curzon_psi(1.0, p)).exp(),
        |[r, z]| 0.1 * r.sin() * z,
    )
    .unwrap()
}

fn er_data() -> ErFields {
    ErFields::from_fns(verify::er_window(verify::ORACLE_N).unwrap(), er::bessel_psi, |[t, r]| 0.1 * t * r + 0.05 * t * t)
        .unwrap()
}

fn gowdy_data() -> GowdyFields {
    GowdyFields::from_avtd(verify::gowdy_window(8.0, verify::ORACLE_N).unwrap(), &verify::avtd_fixture()).unwrap()
}

#[test]
fn axisym_generic_residual_matches_main_equations() {
    let fields = axisym_data();
    let fd = Fd { grid: &fields.grid };
    let (f, o) = (&fields.f, &fields.omega);
    let generic = el_residual(&fields.to_map().unwrap()).unwrap();
    let diff = compare(&generic, Model::Axisym.orientation(), |i, j| {
        let rho = fields.grid.coord(0, i);
        let lap = |a| fd.dd(a, 0, i, j) + fd.d(a, 0, i, j) / rho + fd.dd(a, 1, i, j);
        let (fr, fz, or, oz) = (fd.d(f, 0, i, j), fd.d(f, 1, i, j), fd.d(o, 0, i, j), fd.d(o, 1, i, j));
        let fv = f[[i, j]];
        [lap(f) + (or * or + oz * oz - fr * fr - fz * fz) / fv, lap(o) - 2.0 * (fr * or + fz * oz) / fv]
    });
    assert!(diff <= TOL, "max diff {diff:e}");
}

#[test]
fn er_generic_residual_matches_wave_equations() {
    let fields = er_data();
    let fd = Fd { grid: &fields.grid };
    let (p, o) = (&fields.psi, &fields.omega);
    let generic = el_residual(&fields.to_map().unwrap()).unwrap();
    let diff = compare(&generic, Model::Er.orientation(), |i, j| {
        let rho = fields.grid.coord(1, j);
        let wave = |a| fd.dd(a, 1, i, j) + fd.d(a, 1, i, j) / rho - fd.dd(a, 0, i, j);
        let (pt, pr, ot, or) = (fd.d(p, 0, i, j), fd.d(p, 1, i, j), fd.d(o, 0, i, j), fd.d(o, 1, i, j));
        let e = (-4.0 * p[[i, j]]).exp();
        [wave(p) + 0.5 * e * (or * or - ot * ot), wave(o) + 4.0 * (ot * pt - or * pr)]
    });
    assert!(diff <= TOL, "max diff {diff:e}");
}

#[test]
fn gowdy_generic_residual_matches_evolution_equations() {
    let fields = gowdy_data();
    let fd = Fd { grid: &fields.grid };
    let (p, q) = (&fields.p, &fields.q);
    let generic = el_residual(&fields.to_map().unwrap()).unwrap();
    let diff = compare(&generic, Model::Gowdy.orientation(), |i, j| {
        let e = (-2.0 * fields.grid.coord(0, i)).exp();
        let (pt, pth, qt, qth) = (fd.d(p, 0, i, j), fd.d(p, 1, i, j), fd.d(q, 0, i, j), fd.d(q, 1, i, j));
        let e2p = (2.0 * p[[i, j]]).exp();
        [
            fd.dd(p, 0, i, j) - e * fd.dd(p, 1, i, j) - e2p * (qt * qt - e * qth * qth),
            fd.dd(q, 0, i, j) - e * fd.dd(q, 1, i, j) + 2.0 * (pt * qt - e * pth * qth),
        ]
    });
    assert!(diff <= TOL, "max diff {diff:e}");
}

/// Max over interior points of |T_ab(generic) − T_ab(oracle)| / max|T_ab|.
fn emt_diff(map: &FieldMap, oracle: impl Fn(usize, usize) -> [[f64; 2]; 2]) -> f64 {
    let t = emt(map).lower;
    let region = map.grid().interior();
    let mut worst = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            let scale = region.iter().fold(0.0f64, |m, (i, j)| m.max(oracle(i, j)[a][b].abs())).max(1e-300);
            for (i, j) in region.iter() {
                worst = worst.max((t.at(a, b, i, j) - oracle(i, j)[a][b]).abs() / scale);
            }
        }
    }
    worst
}

#[test]
fn energy_momentum_tensors_match_closed_forms() {
    let fields = axisym_data();
    let fd = Fd { grid: &fields.grid };
    let (f, o) = (&fields.f, &fields.omega);
    let diff = emt_diff(&fields.to_map().unwrap(), |i, j| {
        let c = fields.grid.coord(0, i) / (f[[i, j]] * f[[i, j]]);
        let (fr, fz, or, oz) = (fd.d(f, 0, i, j), fd.d(f, 1, i, j), fd.d(o, 0, i, j), fd.d(o, 1, i, j));
        let rr = 0.25 * c * (fr * fr + or * or - fz * fz - oz * oz);
        let rz = 0.5 * c * (fr * fz + or * oz);
        [[rr, rz], [rz, -rr]]
    });
    assert!(diff <= TOL, "axisym {diff:e}");

    let fields = er_data();
    let fd = Fd { grid: &fields.grid };
    let (p, o) = (&fields.psi, &fields.omega);
    let diff = emt_diff(&fields.to_map().unwrap(), |i, j| {
        let rho = fields.grid.coord(1, j);
        let e = (-4.0 * p[[i, j]]).exp();
        let (pt, pr, ot, or) = (fd.d(p, 0, i, j), fd.d(p, 1, i, j), fd.d(o, 0, i, j), fd.d(o, 1, i, j));
        let tt = rho * (pt * pt + pr * pr) + 0.25 * rho * e * (ot * ot + or * or);
        let tr = 2.0 * rho * pt * pr + 0.5 * rho * e * ot * or;
        [[tt, tr], [tr, tt]]
    });
    assert!(diff <= TOL, "er {diff:e}");

    let fields = gowdy_data();
    let fd = Fd { grid: &fields.grid };
    let (p, q) = (&fields.p, &fields.q);
    let diff = emt_diff(&fields.to_map().unwrap(), |i, j| {
        let tau = fields.grid.coord(0, i);
        let e = (-2.0 * tau).exp();
        let e2p = (2.0 * p[[i, j]]).exp();
        let (pt, pth, qt, qth) = (fd.d(p, 0, i, j), fd.d(p, 1, i, j), fd.d(q, 0, i, j), fd.d(q, 1, i, j));
        let tt = 0.25 * (pt * pt + e * pth * pth + e2p * (qt * qt + e * qth * qth));
        let tth = 0.5 * (pt * pth + e2p * qt * qth);
        [[tt, tth], [tth, tt / e]]
    });
    assert!(diff <= TOL, "gowdy {diff:e}");
}

#[test]
fn oracle_suite_passes_for_every_model() {
    for model in Model::ALL {
        let report = verify::run_suite(verify::Suite::Oracle, model).unwrap();
        assert!(report.passed(), "{}: {:?}", model.name(), report.checks);
    }
}
