use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::sync::OnceLock;

use clap::error::ErrorKind;
use clap::CommandFactory;
use ringshape_core::coulomb::{
    coul_bounds, coul_constants_from_bounds, coul_equipotential, coul_invariants, coul_period,
    coul_planarity, coul_semiclassical, coul_torsion_terms, degeneracy_q, degeneracy_search,
    CoulOrbit, CoulTrajectory, DegeneracyOutcome, SeparatrixOrbit, SeparatrixTrajectory,
};
use ringshape_core::oscillator::{
    osc_constants_from_bounds, osc_equipotential, osc_invariants, osc_periodicity, osc_planarity,
    osc_quantized_constants, osc_semiclassical, osc_torsion_terms, OscOrbit, OscTrajectory,
};
use ringshape_core::verify::{run_all, VerifyConfig};
use ringshape_core::{
    CoulParams, MotionConstants, OrbitSample, OscParams, Periodicity, PhaseState, Sense,
    RATIONAL_MAX_DEN, RATIONAL_TOL,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::report::{drift, number, to_value, with_sink, Report};
use crate::Failure;

type Sampler<T> = Box<dyn Fn(f64) -> ringshape_core::Result<T>>;

const TRAJECTORY_COLUMNS: [&str; 14] = [
    "t",
    "x",
    "y",
    "z",
    "vx",
    "vy",
    "vz",
    "rho",
    "r",
    "theta",
    "phi_unwrapped",
    "H",
    "K_inv",
    "m_inv",
];

static SUBCOMMAND: OnceLock<String> = OnceLock::new();

pub fn set_subcommand(name: &str) {
    let _ = SUBCOMMAND.set(name.to_string());
}

/// A usage error rendered against the running subcommand's usage line.
fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> Failure {
    let mut cmd = Cli::command();
    cmd.build();
    let name = SUBCOMMAND.get().map(String::as_str).unwrap_or_default();
    let err = match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.error(kind, msg),
        None => cmd.error(kind, msg),
    };
    Failure::Usage(err)
}

fn missing(msg: &str) -> Failure {
    usage(ErrorKind::MissingRequiredArgument, msg)
}

fn times(s: &Sampling) -> Result<Vec<f64>, Failure> {
    if s.samples < 2 {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--samples must be at least 2",
        ));
    }
    if !(s.t_end > s.t_start) || !s.t_start.is_finite() || !s.t_end.is_finite() {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--t-end must exceed --t-start",
        ));
    }
    let n = s.samples - 1;
    let step = (s.t_end - s.t_start) / n as f64;
    Ok((0..=n)
        .map(|i| {
            if i == n {
                s.t_end
            } else {
                s.t_start + step * i as f64
            }
        })
        .collect())
}

fn constants_json(c: &MotionConstants) -> Value {
    json!({"E": c.energy, "K": c.separation, "m": c.m_z, "M": c.m_eff})
}

/// Either all of (E, K, m) or none of them.
fn given_constants(c: &ConstantsArgs, q: f64) -> Result<Option<MotionConstants>, Failure> {
    match (c.e, c.k, c.m) {
        (Some(e), Some(k), Some(m)) => Ok(Some(MotionConstants::new(e, k, m, q))),
        (None, None, None) => Ok(None),
        _ => Err(missing("constants need all of --e, --k and --m")),
    }
}

fn sense(retrograde: bool) -> Sense {
    if retrograde {
        Sense::Negative
    } else {
        Sense::Positive
    }
}

fn state_row(sample: &OrbitSample, h: f64, k: f64, m: f64) -> Vec<f64> {
    let s = &sample.state;
    let rho = s.rho();
    let r = s.radius();
    vec![
        s.t,
        s.x,
        s.y,
        s.z,
        s.vx,
        s.vy,
        s.vz,
        rho,
        r,
        rho.atan2(s.z),
        sample.phi,
        h,
        k,
        m,
    ]
}

/// Maximum relative drift per named invariant, NaN where undefined.
fn invariant_drift(report: &mut Report, names: &[&str], values: &[Vec<f64>]) {
    for (i, name) in names.iter().enumerate() {
        report
            .invariant_drift
            .insert(name.to_string(), to_value(drift(values, i)));
    }
}

fn describe_periodicity(p: &Periodicity) -> String {
    match *p {
        Periodicity::Periodic { ratio, period } => format!(
            "periodic, k1={} k2={}, T={}",
            ratio.k1,
            ratio.k2,
            in_units_of_pi(period)
        ),
        Periodicity::QuasiPeriodic { ratio } => format!("quasi-periodic, |M|/m={ratio}"),
        Periodicity::Meridional { period } => {
            format!("meridional, T={}", in_units_of_pi(period))
        }
    }
}

fn in_units_of_pi(t: f64) -> String {
    let k = t / PI;
    let n = k.round();
    if n != 0.0 && (k - n).abs() <= 1e-12 * k.abs() {
        if n == 1.0 {
            "π".into()
        } else {
            format!("{n}π")
        }
    } else {
        format!("{t}")
    }
}

fn confinement(rows: &[Vec<f64>], check: impl Fn(&[f64]) -> f64) -> f64 {
    rows.iter().map(|r| check(r)).fold(0.0, f64::max)
}

pub fn osc_traj(a: &OscTrajArgs) -> Result<(), Failure> {
    let o = &a.orbit;
    let p = OscParams::new(o.omega, o.q)?;
    let (orbit, c) = resolve_osc(&p, &o.constants, &o.geometry, o.phi0, o.t0, o.t0p)?;
    let ts = times(&a.sampling)?;
    let tr = OscTrajectory::new(&p, &orbit, Sense::of(c.m_z))?;

    let mut report = Report::new(
        json!({
            "command": "osc-traj",
            "system": "osc",
            "params": {"omega": p.omega, "q": p.q},
            "constants": constants_json(&c),
            "geometry": {"rho1": orbit.rho1, "rho2": orbit.rho2, "z0": orbit.z0},
            "phases": {"phi0": orbit.phi0, "t0": orbit.t0, "t0p": orbit.t0p},
            "sampling": {"t_start": a.sampling.t_start, "t_end": a.sampling.t_end, "n_samples": ts.len()},
        }),
        &TRAJECTORY_COLUMNS,
    );
    let mut inv = Vec::with_capacity(ts.len());
    for &t in &ts {
        let sample = tr.sample_at(t);
        let named = osc_invariants(&p, &sample.state, 1.0)
            .map(|i| i.named().map(|(_, v)| v))
            .unwrap_or([f64::NAN; 6]);
        let [h, _, a2, a3, ..] = named;
        report.rows.push(state_row(&sample, h, h - a2, a3));
        inv.push(named.to_vec());
    }
    invariant_drift(&mut report, &["H", "A1", "A2", "A3", "A4", "A5"], &inv);

    let planarity = osc_planarity(&p, &tr.state_at(ts[0]), &c)?;
    report.verdict("planarity", planarity);
    let per = osc_periodicity(&p, &c, RATIONAL_TOL, RATIONAL_MAX_DEN)?;
    report.verdict("periodicity_summary", describe_periodicity(&per));
    report.verdict("periodicity", per);
    let excess = confinement(&report.rows, |r| {
        (orbit.rho1 - r[7])
            .max(r[7] - orbit.rho2)
            .max(r[3].abs() - orbit.z0)
            .max(0.0)
    });
    report.verdict("confinement_excess", excess);
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

fn resolve_osc(
    p: &OscParams,
    c: &ConstantsArgs,
    g: &OscGeometry,
    phi0: f64,
    t0: f64,
    t0p: f64,
) -> Result<(OscOrbit, MotionConstants), Failure> {
    if let Some(c) = given_constants(c, p.q)? {
        let orbit = OscOrbit::from_constants(p, &c, phi0, t0, t0p)?;
        return Ok((orbit, c));
    }
    match (g.rho1, g.rho2, g.z0) {
        (Some(r1), Some(r2), Some(z0)) => {
            let orbit = OscOrbit::new(r1, r2, z0, phi0, t0, t0p);
            let c = osc_constants_from_bounds(p, &orbit, sense(g.retrograde))?;
            Ok((orbit, c))
        }
        _ => Err(missing(
            "orbit needs either --e, --k and --m or --rho1, --rho2 and --z0",
        )),
    }
}

enum CoulKind {
    Bounded(CoulOrbit),
    Separatrix(SeparatrixOrbit),
}

fn resolve_coul(
    p: &CoulParams,
    c: &ConstantsArgs,
    g: &CoulGeometry,
    phi0: f64,
    t0: f64,
    beta0: f64,
) -> Result<(CoulKind, MotionConstants), Failure> {
    if let Some(c) = given_constants(c, p.q)? {
        if c.energy == 0.0 {
            let orbit = SeparatrixOrbit::from_constants(p, &c, phi0, beta0, t0)?;
            return Ok((CoulKind::Separatrix(orbit), c));
        }
        let orbit = CoulOrbit::from_constants(p, &c, phi0, t0, beta0)?;
        return Ok((CoulKind::Bounded(orbit), c));
    }
    match (g.r1, g.r2, g.theta0) {
        (Some(r1), Some(r2), Some(theta0)) => {
            let orbit = CoulOrbit::new(r1, r2, theta0, phi0, t0, beta0);
            let c = coul_constants_from_bounds(p, &orbit, sense(g.retrograde))?;
            Ok((CoulKind::Bounded(orbit), c))
        }
        _ => Err(missing(
            "orbit needs either --e, --k and --m or --r1, --r2 and --theta0",
        )),
    }
}

pub fn coul_traj(a: &CoulTrajArgs) -> Result<(), Failure> {
    let o = &a.orbit;
    let p = CoulParams::new(o.zed, o.q)?;
    let (kind, c) = resolve_coul(&p, &o.constants, &o.geometry, o.phi0, o.t0, o.beta0)?;
    let ts = times(&a.sampling)?;
    let sense = Sense::of(c.m_z);

    let (geometry, sampler): (Value, Sampler<OrbitSample>) = match kind {
        CoulKind::Bounded(orbit) => {
            let tr = CoulTrajectory::new(&p, &orbit, sense)?;
            (
                json!({"r1": orbit.r1, "r2": orbit.r2, "theta0": orbit.theta0}),
                Box::new(move |t| tr.sample_at(t)),
            )
        }
        CoulKind::Separatrix(orbit) => {
            let tr = SeparatrixTrajectory::new(&p, &orbit, sense)?;
            (
                json!({"r_min": orbit.r_min, "theta0": orbit.theta0}),
                Box::new(move |t| tr.sample_at(t)),
            )
        }
    };
    let mut report = Report::new(
        json!({
            "command": "coul-traj",
            "system": "coul",
            "params": {"zed": p.z_strength, "q": p.q},
            "constants": constants_json(&c),
            "geometry": geometry,
            "phases": {"phi0": o.phi0, "t0": o.t0, "beta0": o.beta0},
            "sampling": {"t_start": a.sampling.t_start, "t_end": a.sampling.t_end, "n_samples": ts.len()},
        }),
        &TRAJECTORY_COLUMNS,
    );
    let mut inv = Vec::with_capacity(ts.len());
    for &t in &ts {
        let sample = sampler(t)?;
        let named = coul_invariants(&p, &sample.state)
            .map(|i| i.named().map(|(_, v)| v))
            .unwrap_or([f64::NAN; 4]);
        let [h, b1, b2, _] = named;
        report.rows.push(state_row(&sample, h, b1, b2));
        inv.push(named.to_vec());
    }
    invariant_drift(&mut report, &["H", "B1", "B2", "B3"], &inv);

    let planarity = coul_planarity(&p, &sampler(ts[0])?.state, &c)?;
    report.verdict("planarity", planarity);
    if c.energy < 0.0 {
        let per = coul_period(&p, &c, RATIONAL_TOL, RATIONAL_MAX_DEN)?;
        report.verdict(
            "periodicity_summary",
            describe_periodicity(&per.periodicity),
        );
        report.verdict("period", per);
        let b = coul_bounds(&p, &c)?;
        let sin0 = b.theta0.sin();
        let excess = confinement(&report.rows, |r| {
            let sin_t = r[7] / r[8];
            (b.r1 - r[8]).max(r[8] - b.r2).max(sin0 - sin_t).max(0.0)
        });
        report.verdict("confinement_excess", excess);
    }
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

fn osc_params(s: &SystemParams) -> Result<OscParams, Failure> {
    if s.zed.is_some() {
        return Err(usage(
            ErrorKind::ArgumentConflict,
            "--zed belongs to --system coul",
        ));
    }
    let omega = s
        .omega
        .ok_or_else(|| missing("--system osc needs --omega"))?;
    Ok(OscParams::new(omega, s.q)?)
}

fn coul_params(s: &SystemParams) -> Result<CoulParams, Failure> {
    if s.omega.is_some() {
        return Err(usage(
            ErrorKind::ArgumentConflict,
            "--omega belongs to --system osc",
        ));
    }
    let zed = s.zed.ok_or_else(|| missing("--system coul needs --zed"))?;
    Ok(CoulParams::new(zed, s.q)?)
}

pub fn equipot(a: &EquipotArgs) -> Result<(), Failure> {
    let s = &a.params;
    let (curve, params) = match s.system {
        System::Osc => {
            if a.rho_max.is_some() {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    "--rho-max applies to --system coul",
                ));
            }
            let p = osc_params(s)?;
            (
                osc_equipotential(&p, a.level, a.samples)?,
                json!({"omega": p.omega, "q": p.q}),
            )
        }
        System::Coul => {
            let p = coul_params(s)?;
            (
                coul_equipotential(&p, a.level, a.samples, a.rho_max)?,
                json!({"zed": p.z_strength, "q": p.q}),
            )
        }
    };
    let mut report = Report::new(
        json!({
            "command": "equipot",
            "system": system_name(s.system),
            "params": params,
            "level": a.level,
            "n_samples": a.samples,
            "rho_max": a.rho_max,
        }),
        &["rho", "z"],
    );
    report.rows = curve.samples.iter().map(|&(rho, z)| vec![rho, z]).collect();
    report.verdict("kind", curve.kind);
    report.verdict("rho_inner", curve.rho_inner);
    report.verdict("rho_outer", curve.rho_outer);
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

fn system_name(s: System) -> &'static str {
    match s {
        System::Osc => "osc",
        System::Coul => "coul",
    }
}

pub fn planarity(a: &PlanarityArgs) -> Result<(), Failure> {
    let s = SystemParams {
        system: a.system,
        omega: a.omega,
        zed: a.zed,
        q: a.q,
    };
    if a.samples < 2 {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--samples must be at least 2",
        ));
    }
    let mut report = Report::new(Value::Null, &["t", "torsion_num", "torsion_den", "torsion"]);
    let (planarity, c, geometry, params, states) = match a.system {
        System::Osc => {
            if a.r1.is_some() || a.r2.is_some() || a.theta0.is_some() {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    "--r1, --r2, --theta0 belong to --system coul",
                ));
            }
            let p = osc_params(&s)?;
            let g = OscGeometry {
                rho1: a.rho1,
                rho2: a.rho2,
                z0: a.z0,
                retrograde: a.retrograde,
            };
            let (orbit, c) = resolve_osc(&p, &a.constants, &g, a.phi0, a.t0, a.phase)?;
            let tr = OscTrajectory::new(&p, &orbit, Sense::of(c.m_z))?;
            let t_end = a.t_end.unwrap_or(p.oscillator_period());
            let ts = times(&Sampling {
                t_start: 0.0,
                t_end,
                samples: a.samples,
            })?;
            let states: Vec<PhaseState> = ts.iter().map(|&t| tr.state_at(t)).collect();
            let verdict = osc_planarity(&p, &states[0], &c)?;
            let terms: Vec<_> = states.iter().map(|st| osc_torsion_terms(&p, st)).collect();
            (
                verdict,
                c,
                json!({"rho1": orbit.rho1, "rho2": orbit.rho2, "z0": orbit.z0}),
                json!({"omega": p.omega, "q": p.q}),
                states.into_iter().zip(terms).collect::<Vec<_>>(),
            )
        }
        System::Coul => {
            if a.rho1.is_some() || a.rho2.is_some() || a.z0.is_some() {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    "--rho1, --rho2, --z0 belong to --system osc",
                ));
            }
            let p = coul_params(&s)?;
            let g = CoulGeometry {
                r1: a.r1,
                r2: a.r2,
                theta0: a.theta0,
                retrograde: a.retrograde,
            };
            let (kind, c) = resolve_coul(&p, &a.constants, &g, a.phi0, a.t0, a.phase)?;
            let sense = Sense::of(c.m_z);
            let (geometry, sampler, base): (Value, Sampler<PhaseState>, f64) = match kind {
                CoulKind::Bounded(orbit) => {
                    let tr = CoulTrajectory::new(&p, &orbit, sense)?;
                    let base = tr.radial_period();
                    (
                        json!({"r1": orbit.r1, "r2": orbit.r2, "theta0": orbit.theta0}),
                        Box::new(move |t| tr.state_at(t)),
                        base,
                    )
                }
                CoulKind::Separatrix(orbit) => {
                    let tr = SeparatrixTrajectory::new(&p, &orbit, sense)?;
                    let base = (2.0 * orbit.r_min.powi(3) / p.z_strength).sqrt() * TAU;
                    (
                        json!({"r_min": orbit.r_min, "theta0": orbit.theta0}),
                        Box::new(move |t| tr.state_at(t)),
                        base,
                    )
                }
            };
            let t_end = a.t_end.unwrap_or(base);
            let ts = times(&Sampling {
                t_start: 0.0,
                t_end,
                samples: a.samples,
            })?;
            let states = ts
                .iter()
                .map(|&t| sampler(t))
                .collect::<Result<Vec<_>, _>>()?;
            let verdict = coul_planarity(&p, &states[0], &c)?;
            let terms: Vec<_> = states.iter().map(|st| coul_torsion_terms(&p, st)).collect();
            (
                verdict,
                c,
                geometry,
                json!({"zed": p.z_strength, "q": p.q}),
                states.into_iter().zip(terms).collect(),
            )
        }
    };
    let mut max_tau: f64 = 0.0;
    for (st, terms) in &states {
        let (num, den) = terms.clone().unwrap_or((f64::NAN, f64::NAN));
        let tau = if den > 0.0 { -num / den } else { f64::NAN };
        if tau.is_finite() {
            max_tau = max_tau.max(tau.abs());
        }
        report.rows.push(vec![st.t, num, den, tau]);
    }
    report.config = json!({
        "command": "planarity",
        "system": system_name(a.system),
        "params": params,
        "constants": constants_json(&c),
        "geometry": geometry,
        "n_samples": a.samples,
    });
    report.verdict("verdict", planarity.verdict);
    report.verdict("planar", planarity.verdict.is_planar());
    report.verdict("initial", planarity);
    report.verdict("max_abs_torsion", max_tau);
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

pub fn period(a: &PeriodArgs) -> Result<(), Failure> {
    let s = &a.params;
    let mut report = Report::new(Value::Null, &["k1", "k2", "period"]);
    let (per, params, constants) = match s.system {
        System::Osc => {
            let p = osc_params(s)?;
            let m = a
                .constants
                .m
                .ok_or_else(|| missing("--system osc needs --m"))?;
            let c = MotionConstants::new(
                a.constants.e.unwrap_or(f64::NAN),
                a.constants.k.unwrap_or(f64::NAN),
                m,
                p.q,
            );
            let per = osc_periodicity(&p, &c, a.tol, a.max_den)?;
            if let Periodicity::Periodic { ratio, .. } = per {
                if p.q > 0.0 {
                    let (m2, r2) = osc_quantized_constants(p.q, ratio.k1, ratio.k2, p.omega)?;
                    report.verdict("quantized", json!({"m2": m2, "rho1_rho2_squared": r2}));
                }
            }
            (
                per,
                json!({"omega": p.omega, "q": p.q}),
                json!({"m": m, "M": c.m_eff}),
            )
        }
        System::Coul => {
            let p = coul_params(s)?;
            let c = given_constants(&a.constants, p.q)?
                .ok_or_else(|| missing("--system coul needs --e, --k and --m"))?;
            let per = coul_period(&p, &c, a.tol, a.max_den)?;
            report.verdict("radial_period", per.radial);
            if let Some((m2, geom)) = per.quantized {
                report.verdict("quantized", json!({"m2": m2, "r1r2_sin2_over_sum": geom}));
            }
            (
                per.periodicity,
                json!({"zed": p.z_strength, "q": p.q}),
                constants_json(&c),
            )
        }
    };
    report.config = json!({
        "command": "period",
        "system": system_name(s.system),
        "params": params,
        "constants": constants,
        "tol": a.tol,
        "max_den": a.max_den,
    });
    if let Periodicity::Periodic { ratio, period } = per {
        report
            .rows
            .push(vec![ratio.k1 as f64, ratio.k2 as f64, period]);
    }
    report.verdict("summary", describe_periodicity(&per));
    report.verdict("periodicity", per);
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), Failure> {
    let s = &a.params;
    let (energy, config, columns) = match s.system {
        System::Osc => {
            if a.nr.is_some() || a.ntheta.is_some() {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    "--nr and --ntheta belong to --system coul",
                ));
            }
            let p = osc_params(s)?;
            let (n1, n2) = (a.nrho.unwrap_or(0), a.nz.unwrap_or(0));
            (
                osc_semiclassical(&p, a.m, n1, n2),
                json!({"params": {"omega": p.omega, "q": p.q}, "m": a.m, "n_rho": n1, "n_z": n2}),
                ["m", "n_rho", "n_z", "energy"],
            )
        }
        System::Coul => {
            if a.nrho.is_some() || a.nz.is_some() {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    "--nrho and --nz belong to --system osc",
                ));
            }
            let p = coul_params(s)?;
            let (n1, n2) = (a.nr.unwrap_or(0), a.ntheta.unwrap_or(0));
            (
                coul_semiclassical(&p, a.m, n1, n2),
                json!({"params": {"zed": p.z_strength, "q": p.q}, "m": a.m, "n_r": n1, "n_theta": n2}),
                ["m", "n_r", "n_theta", "energy"],
            )
        }
    };
    let mut config = config;
    config["command"] = json!("spectrum");
    config["system"] = json!(system_name(s.system));
    let (n1, n2) = match s.system {
        System::Osc => (a.nrho.unwrap_or(0), a.nz.unwrap_or(0)),
        System::Coul => (a.nr.unwrap_or(0), a.ntheta.unwrap_or(0)),
    };
    let mut report = Report::new(config, &columns);
    report
        .rows
        .push(vec![a.m as f64, n1 as f64, n2 as f64, energy]);
    report.verdict("energy", energy);
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

pub fn degeneracy(a: &DegeneracyArgs) -> Result<(), Failure> {
    let mut report = Report::new(Value::Null, &["m", "m_prime", "i_shift", "q", "shift"]);
    if let Some(q) = a.q {
        let found = degeneracy_search(q, a.tol, a.max_m, a.max_i)?;
        for d in &found {
            report.rows.push(vec![
                d.m as f64,
                d.m_prime as f64,
                d.i_shift as f64,
                d.q_value,
                d.shift() as f64,
            ]);
        }
        report.config = json!({
            "command": "degeneracy",
            "q": q,
            "tol": a.tol,
            "max_m": a.max_m,
            "max_i": a.max_i,
        });
        report.verdict("count", found.len());
        report.verdict("triples", found);
    } else {
        let t = a.triple.as_deref().unwrap_or_default();
        let [m, m_prime, i_shift] = *t else {
            return Err(usage(
                ErrorKind::WrongNumberOfValues,
                "--triple takes m,m',I",
            ));
        };
        let outcome = degeneracy_q(m, m_prime, i_shift)?;
        if let DegeneracyOutcome::Degenerate(d) = outcome {
            report.rows.push(vec![
                m as f64,
                m_prime as f64,
                i_shift as f64,
                d.q_value,
                d.shift() as f64,
            ]);
        }
        report.config = json!({"command": "degeneracy", "triple": [m, m_prime, i_shift]});
        report.verdict("outcome", outcome);
    }
    report.emit(a.output.format, a.output.output.as_deref())?;
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    if !(a.tol > 0.0 && a.tol < 1e-3) {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--tol must lie in (0, 1e-3)",
        ));
    }
    let cfg = VerifyConfig {
        tol: a.tol,
        ..VerifyConfig::default()
    };
    let checks = run_all(&cfg);
    let failed = checks.iter().filter(|c| !c.passed).count();
    match a.format {
        VerifyFormat::Table => with_sink(a.output.as_deref(), |out: &mut dyn Write| {
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                write!(
                    out,
                    "{mark}  {:<12} {:<width$}  measured {:>24}  threshold {:>24}",
                    c.suite,
                    c.name,
                    number(c.measured),
                    number(c.threshold),
                )?;
                match &c.note {
                    Some(n) => writeln!(out, "  {n}")?,
                    None => writeln!(out)?,
                }
            }
            writeln!(out, "{} checks, {} failed", checks.len(), failed)
        })?,
        VerifyFormat::Json => {
            let mut report = Report::new(
                json!({"command": "verify", "tol": cfg.tol, "osc": cfg.osc, "coul": cfg.coul}),
                &["measured", "threshold", "passed"],
            );
            for c in &checks {
                report
                    .rows
                    .push(vec![c.measured, c.threshold, c.passed as u8 as f64]);
                if c.name.contains("drift") {
                    report
                        .invariant_drift
                        .insert(format!("{}: {}", c.suite, c.name), to_value(c.measured));
                }
            }
            report.verdict("passed", failed == 0);
            report.verdict("failed", failed);
            report.verdict("checks", &checks);
            report.emit(Format::Json, a.output.as_deref())?;
        }
    }
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}
