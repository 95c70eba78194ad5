use anyhow::{bail, Context, Result};
use potnet::comparison::{
    adjoint_relation_residual, conjugation_identity_residual, cross_adjoint, embedding_norm,
    geometric_invariant, harmonic_transfer_invariant, lower_bound_criterion, validate_pair,
};
use potnet::energy::{dipole, effective_resistance, energy_kernel, schur_reduce};
use potnet::families::Family;
use potnet::spectral::{moment, monotonicity_check, spectral_measure};
use potnet::walks::{
    escape_probability_exact, escape_probability_mc, reciprocity_report, WalkMethod,
};
use potnet::{Network, VertexFunction};

use crate::input::LoadedPair;
use crate::report::{num, sci, status, Report};

/// A finished report and whether every check in it passed.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            passed: true,
        }
    }
}

fn vertex_or_origin<'a>(network: &'a Network, v: Option<&'a str>) -> Result<&'a str> {
    let v = v.unwrap_or(network.origin_id());
    network.index_of(v)?;
    Ok(v)
}

pub fn describe(network: &Network) -> Result<Outcome> {
    let mut r = Report::new("network", &["property", "value"]);
    r.row(["vertices".to_string(), network.len().to_string()]);
    r.row(["edges".to_string(), network.edge_count().to_string()]);
    r.row(["origin", network.origin_id()]);
    let degrees: Vec<f64> = (0..network.len()).map(|i| network.degree_at(i)).collect();
    let (lo, hi) = degrees
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    if !degrees.is_empty() {
        r.row(["min degree".to_string(), num(lo)]);
        r.row(["max degree".to_string(), num(hi)]);
    }
    let components = network.components();
    let connected = components.len() <= 1;
    r.row([
        "connected".to_string(),
        if connected {
            "yes".to_string()
        } else {
            format!("no ({} components)", components.len())
        },
    ]);
    if let Some(eps) = network.min_conductance() {
        r.row(["epsilon (min conductance)".to_string(), num(eps)]);
        r.row(["bound 1/sqrt(epsilon)".to_string(), num(1.0 / eps.sqrt())]);
        if connected {
            let lb = lower_bound_criterion(network)?;
            r.row([
                "measured norm into unit network".to_string(),
                num(lb.measured_norm),
            ]);
        }
    }
    Ok(Outcome {
        report: r,
        passed: connected,
    })
}

pub fn resistance(network: &Network, x: &str, y: Option<&str>) -> Result<Outcome> {
    let y = vertex_or_origin(network, y)?;
    let value = effective_resistance(network, x, y)?;
    let mut r = Report::new("effective resistance", &["x", "y", "resistance"]);
    r.row([x.to_string(), y.to_string(), num(value)]);
    Ok(Outcome::ok(r))
}

pub fn dipole_report(network: &Network, x: &str, y: Option<&str>) -> Result<Outcome> {
    let y = vertex_or_origin(network, y)?;
    let v = dipole(network, x, y)?;
    let mut r = Report::new(
        format!("dipole {x} -> {y}, grounded at {}", network.origin_id()),
        &["vertex", "value"],
    );
    for (i, name) in network.vertices().iter().enumerate() {
        r.row([name.clone(), num(v.get(i))]);
    }
    Ok(Outcome::ok(r))
}

fn dipole_difference(network: &Network, x: &str, y: &str) -> Result<VertexFunction> {
    let o = network.origin_id();
    Ok(dipole(network, x, o)?.sub(&dipole(network, y, o)?))
}

pub fn moments(
    network: &Network,
    x: &str,
    y: Option<&str>,
    kmax: u32,
    tol: Option<f64>,
) -> Result<Outcome> {
    let y = vertex_or_origin(network, y)?;
    let u = dipole_difference(network, x, y)?;
    let measure = spectral_measure(network, &u)?;
    let tol = tol.unwrap_or(1e-7);
    let mut r = Report::new(format!("moments of v_{x} - v_{y}"), &["k", "m_k"]);
    let mut passed = true;
    for k in 0..=kmax {
        let m = moment(network, &u, k)?;
        let spectral = measure.moment(k);
        let ok = (m - spectral).abs() <= tol * m.abs().max(1.0);
        passed &= ok;
        r.row([k.to_string(), num(m)]);
        if !ok {
            r.note(format!(
                "k = {k}: spectral cross-check gives {}",
                num(spectral)
            ));
        }
    }
    r.note(format!(
        "spectral cross-check within {}: {}",
        sci(tol),
        status(passed)
    ));
    Ok(Outcome { report: r, passed })
}

pub fn measure(network: &Network, x: &str, y: Option<&str>) -> Result<Outcome> {
    let y = vertex_or_origin(network, y)?;
    let u = dipole_difference(network, x, y)?;
    let measure = spectral_measure(network, &u)?;
    let mut r = Report::new(
        format!("spectral measure of v_{x} - v_{y}"),
        &["lambda", "weight"],
    );
    for &(lam, w) in &measure.atoms {
        r.row([num(lam), num(w)]);
    }
    r.note(format!("total mass {}", num(measure.total_mass())));
    Ok(Outcome::ok(r))
}

pub fn walk(
    network: &Network,
    x: &str,
    trials: Option<u64>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome> {
    let o = network.origin_id();
    let exact = escape_probability_exact(network, x, o)?;
    let rec = reciprocity_report(network, x, o)?;
    let tol = tol.unwrap_or(1e-9);
    let passed = rec.gap <= tol;
    let mut r = Report::new(format!("escape from {x} to {o}"), &["quantity", "value"]);
    r.row([
        "exact escape probability".to_string(),
        num(exact.probability),
    ]);
    r.row(["1/(c(x) R(x,o))".to_string(), num(rec.rhs)]);
    r.row(["reciprocity gap".to_string(), sci(rec.gap)]);
    r.row([
        "reciprocity check".to_string(),
        format!("{} (tol {})", status(passed), sci(tol)),
    ]);
    if let Some(trials) = trials {
        let mc = escape_probability_mc(network, x, o, trials, seed)?;
        if let WalkMethod::MonteCarlo {
            standard_error,
            censored,
            ..
        } = mc.method
        {
            r.row(["monte carlo estimate".to_string(), num(mc.probability)]);
            r.row(["standard error".to_string(), num(standard_error)]);
            r.row(["trials".to_string(), trials.to_string()]);
            r.row(["seed".to_string(), seed.to_string()]);
            r.row(["censored walks".to_string(), censored.to_string()]);
        }
    }
    Ok(Outcome { report: r, passed })
}

/// Domination failures are input errors; every other check is reported.
pub fn compare(loaded: &LoadedPair, tol: Option<f64>) -> Result<Outcome> {
    let pair = &loaded.pair;
    let violations = validate_pair(pair);
    if !violations.is_empty() {
        let listed: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        bail!("invalid pair:\n{}", listed.join("\n"));
    }
    let mut r = Report::new(
        "comparison b <= c",
        &["check", "value", "tolerance", "status"],
    );
    let mut passed = true;
    let mut check = |r: &mut Report, name: &str, value: f64, ok: bool, tolerance: f64| {
        passed &= ok;
        r.row([
            name.to_string(),
            num(value),
            sci(tolerance),
            status(ok).to_string(),
        ]);
    };

    let t = tol.unwrap_or(1e-9);
    let norm = embedding_norm(pair)?;
    check(&mut r, "embedding norm <= 1", norm, norm <= 1.0 + t, t);

    let t = tol.unwrap_or(1e-8);
    let conj = conjugation_identity_residual(pair)?;
    check(&mut r, "conjugation residual", conj, conj <= t, t);

    let m = cross_adjoint(pair)?;
    let kc = energy_kernel(pair.c())?;
    let mut cross = 0.0f64;
    for u in kc.dipoles() {
        for v in kc.dipoles() {
            cross = cross.max(adjoint_relation_residual(pair, &m, u, v)?);
        }
    }
    check(&mut r, "cross-adjoint residual", cross, cross <= t, t);

    let kb = energy_kernel(pair.b())?;
    let (mut m1, mut m2) = (0.0f64, f64::INFINITY);
    for u in kb.dipoles() {
        let gaps = monotonicity_check(pair, u)?;
        m1 = m1.max(gaps.m1_gap.abs());
        m2 = m2.min(gaps.m2_gap);
    }
    check(&mut r, "max |m1 gap|", m1, m1 <= t, t);
    let t = tol.unwrap_or(1e-9);
    check(&mut r, "min m2 gap >= 0", m2, m2 >= -t, t);
    Ok(Outcome { report: r, passed })
}

pub fn invariant(loaded: &LoadedPair, interior: &[String], tol: Option<f64>) -> Result<Outcome> {
    let interior: Vec<String> = match (&loaded.geometric, interior.is_empty()) {
        (_, false) => interior.to_vec(),
        (Some((n, _, _)), true) => {
            Family::GeometricIntegers { n: *n, base: 2.0 }.natural_interior()
        }
        (None, true) => bail!("--interior is required unless the pair is geometric"),
    };
    let inv = harmonic_transfer_invariant(&loaded.pair, &interior)?;
    let mut r = Report::new("harmonic transfer invariant", &["quantity", "value"]);
    r.row(["K".to_string(), num(inv.k)]);
    let mut passed = true;
    if let Some((n, b, c)) = loaded.geometric {
        let closed = geometric_invariant(b, c);
        let t = tol.unwrap_or(1e-2);
        let delta = (inv.k - closed).abs();
        passed = delta <= t;
        r.row(["N".to_string(), n.to_string()]);
        r.row(["closed form sqrt((b-1)/(c-1))".to_string(), num(closed)]);
        r.row(["delta".to_string(), sci(delta)]);
        r.row([
            "check".to_string(),
            format!("{} (tol {})", status(passed), sci(t)),
        ]);
    }
    r.row(["alignment".to_string(), num(inv.alignment)]);
    Ok(Outcome { report: r, passed })
}

pub fn reduce(network: &Network, keep: &[String], origin: Option<&str>) -> Result<Network> {
    schur_reduce(network, keep, origin).context("Schur reduction failed")
}
