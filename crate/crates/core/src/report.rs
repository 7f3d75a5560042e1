//! Command drivers: each `cmd_*` runs one family of checks and returns a
//! [`Report`] with per-test verdicts and an exit code (0 all pass, 1 some
//! verdict failed, 2 bad input).

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::fibre::{count_fibre_product_nodes, graph_symmetry_check, intersection_graph, FibrationSketch};
use crate::fixtures;
use crate::lattice::{approx, format_rational, parse_rational, Rational};
use crate::local::{run_local_models, RESIDUAL_TOL};
use crate::monodromy::{dehn_twist, validate_fibration, word_product, TwistWord};
use crate::profile::{
    c1_cubed, det_positivity_b2_3, hard_lefschetz_test, hodge_riemann_signature_test, integral, mori_mukai_lookup,
    rigid_cy_check, salvage_profile, CohomologyClass, FanoLookup, InvariantProfile, Outcome,
};
use crate::surgery::{
    an_chain_record, conifold_transition, euler_char, odp_full_blowup, triple_point_transition, SurgeryRecord,
};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub test: String,
    pub outcome: String,
    pub details: String,
    pub anchor: String,
}

impl Verdict {
    pub fn new(test: &str, outcome: &Outcome, details: impl Into<String>, anchor: &str) -> Self {
        let mut details = details.into();
        if let Outcome::Skipped(why) = outcome {
            if details.is_empty() {
                details = why.clone();
            } else {
                details = format!("{details}; {why}");
            }
        }
        Self {
            test: test.into(),
            outcome: outcome.label().into(),
            details,
            anchor: anchor.into(),
        }
    }

    pub fn is_fail(&self) -> bool {
        self.outcome == "fail"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub exit_code: i32,
}

impl Report {
    fn finish(command: &str, inputs: Value, results: Value, verdicts: Vec<Verdict>) -> Self {
        let exit_code = if verdicts.iter().any(Verdict::is_fail) { 1 } else { 0 };
        Self {
            command: command.into(),
            inputs,
            results,
            verdicts,
            exit_code,
        }
    }

    pub fn input_error(command: &str, inputs: Value, err: &Error) -> Self {
        Self {
            command: command.into(),
            inputs,
            results: json!({ "error": err.to_string() }),
            verdicts: Vec::new(),
            exit_code: 2,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        if let Some(err) = self.results.get("error") {
            let _ = writeln!(out, "  input error: {}", err.as_str().unwrap_or_default());
        }
        for v in &self.verdicts {
            let _ = write!(out, "  [{:>7}] {}", v.outcome.to_uppercase(), v.test);
            if !v.details.is_empty() {
                let _ = write!(out, ": {}", v.details);
            }
            let _ = writeln!(out, "  ({})", v.anchor);
        }
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                if k == "error" || k == "profile" || k == "graph" {
                    continue;
                }
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
        let _ = writeln!(out, "exit code {}", self.exit_code);
        out
    }
}

fn wrap(command: &str, inputs: Value, run: impl FnOnce() -> Result<Report>) -> Report {
    run().unwrap_or_else(|e| Report::input_error(command, inputs, &e))
}

/// A path to a JSON file if it exists, otherwise a fixture name.
pub fn resolve_profile(arg: &str) -> Result<InvariantProfile> {
    let path = Path::new(arg);
    if path.is_file() {
        InvariantProfile::from_path(path)
    } else {
        fixtures::load_profile(arg)
    }
}

pub fn resolve_word(arg: &str) -> Result<TwistWord> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        TwistWord::from_json_str(&text)
    } else {
        fixtures::load_word(arg)
    }
}

pub fn resolve_sketch(arg: &str) -> Result<FibrationSketch> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        FibrationSketch::from_json_str(&text)
    } else {
        fixtures::load_sketch(arg)
    }
}

/// Parameters of the P²×P¹ conifold-transition profile.
#[derive(Clone, Debug, PartialEq)]
pub struct SalvageParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub eps: Rational,
    pub a_sign: i64,
    pub b: i64,
    pub sign: i64,
}

impl SalvageParams {
    /// Parses `alpha,beta,eps,A,B,sign` with sign `+` or `-`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [alpha, beta, eps, a, b, sign] = parts[..] else {
            return Err(Error::Parse(format!("expected alpha,beta,eps,A,B,sign; got {s:?}")));
        };
        let int = |x: &str| x.parse::<i64>().map_err(|_| Error::Parse(format!("not an integer: {x:?}")));
        Ok(Self {
            alpha: parse_rational(alpha)?,
            beta: parse_rational(beta)?,
            eps: parse_rational(eps)?,
            a_sign: int(a)?,
            b: int(b)?,
            sign: match sign {
                "+" | "1" | "+1" => 1,
                "-" | "-1" => -1,
                _ => return Err(Error::Parse(format!("sign must be + or -, got {sign:?}"))),
            },
        })
    }
}

/// Where the profile under test comes from.
#[derive(Clone, Debug)]
pub enum ProfileSource {
    /// File path or fixture name.
    Named(String),
    Salvage(SalvageParams),
}

impl ProfileSource {
    /// `salvage:alpha,beta,eps,A,B,sign` or a path/fixture name.
    pub fn parse(arg: &str) -> Result<Self> {
        match arg.strip_prefix("salvage:") {
            Some(rest) => Ok(Self::Salvage(SalvageParams::parse(rest)?)),
            None => Ok(Self::Named(arg.to_string())),
        }
    }

    fn load(&self) -> Result<(InvariantProfile, Option<CohomologyClass>)> {
        match self {
            Self::Named(arg) => {
                let p = resolve_profile(arg)?;
                let w = p.omega.clone();
                Ok((p, w))
            }
            Self::Salvage(s) => {
                let (p, w) = salvage_profile(&s.alpha, &s.beta, &s.eps, s.a_sign, s.b, s.sign)?;
                Ok((p, Some(w)))
            }
        }
    }
}

pub fn parse_class_coords(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn coords_json(c: &CohomologyClass) -> Value {
    json!(c.coords.iter().map(format_rational).collect::<Vec<_>>())
}

/// Runs the Kähler obstruction tests on a profile.
pub fn cmd_profile_check(source: &str, omega_override: Option<&str>) -> Report {
    let inputs = json!({ "profile": source, "omega": omega_override });
    wrap("profile-check", inputs.clone(), || {
        let (p, default_w) = ProfileSource::parse(source)?.load()?;
        let w = match omega_override {
            Some(s) => p.class(parse_class_coords(s)?)?,
            None => default_w.ok_or(Error::Missing("omega (give --omega)"))?,
        };
        let hl = hard_lefschetz_test(&p, &w)?;
        let sig = hodge_riemann_signature_test(&p, &w)?;
        let det = det_positivity_b2_3(&p, &w)?;
        let pairing = p.triple.contract(&w.coords).ok();
        let mut results = json!({
            "profile": p.name,
            "b1": p.b1, "b2": p.b2, "b3": p.b3,
            "euler_char": euler_char(&p),
            "omega": coords_json(&w),
            "rigid_cy": rigid_cy_check(&p),
        });
        if let Some(m) = &pairing {
            results["pairing_matrix"] = json!(m.to_string());
            results["pairing_det"] = json!(format_rational(&m.det()?));
            let s = m.signature()?;
            results["pairing_signature"] = json!([s.pos, s.neg, s.zero]);
        }
        match c1_cubed(&p) {
            Ok(c3) => {
                results["c1_cubed"] = json!(format_rational(&c3));
                if let Some(k) = integral(&c3).filter(|&k| k > 0 && p.b2 >= 1) {
                    let table = fixtures::load_fano_table()?;
                    results["fano_table"] = match mori_mukai_lookup(&table, p.b2, k)? {
                        FanoLookup::Found(labels) => json!({ "found": labels }),
                        FanoLookup::Absent => json!("absent"),
                    };
                }
            }
            Err(Error::UnknownProducts(key)) => results["c1_cubed"] = json!(format!("unknown (t{key:?})")),
            Err(Error::Missing(_)) => results["c1_cubed"] = Value::Null,
            Err(e) => return Err(e),
        }
        let verdicts = vec![
            Verdict::new("hard_lefschetz", &hl, "det(A·B·ω) ≠ 0", "pairing H4×H4 → R nondegenerate"),
            Verdict::new(
                "hodge_riemann_signature",
                &sig,
                match (p.h20, p.h11) {
                    (Some(a), Some(b)) => format!("expected signature ({}, {})", 1 + 2 * a, b as i64 - 1),
                    _ => String::new(),
                },
                "signature (1 + 2h20, h11 − 1)",
            ),
            Verdict::new("det_positivity_b2_3", &det, "det > 0 and odd positive index", "b2 = 3: det of ∩[ω] positive"),
        ];
        Ok(Report::finish("profile-check", inputs.clone(), results, verdicts))
    })
}

/// Surgery kinds accepted by [`cmd_surgery`].
#[derive(Clone, Debug, PartialEq)]
pub enum SurgeryParams {
    Conifold { n: u32, r: u32 },
    OdpBlowup { r: u32, a: Rational },
    TriplePoint { r: u32 },
    AnChain { n: i64 },
}

impl SurgeryParams {
    /// Builds the parameters for `kind` from optional integer flags.
    pub fn from_kind(kind: &str, n: Option<i64>, r: Option<i64>, a: Option<&str>) -> Result<Self> {
        let need = |v: Option<i64>, what: &'static str| v.ok_or(Error::Missing(what));
        let nonneg = |v: i64, what: &str| {
            u32::try_from(v).map_err(|_| Error::Invalid(format!("{what} must be a non-negative integer")))
        };
        Ok(match kind {
            "conifold" => Self::Conifold {
                n: nonneg(need(n, "n")?, "n")?,
                r: nonneg(need(r, "r")?, "r")?,
            },
            "odp-blowup" => Self::OdpBlowup {
                r: nonneg(r.unwrap_or(0), "r")?,
                a: a.map(parse_rational).transpose()?.unwrap_or_else(|| crate::lattice::int(1)),
            },
            "triple-point" => Self::TriplePoint {
                r: nonneg(r.unwrap_or(0), "r")?,
            },
            "an-chain" => Self::AnChain { n: need(n, "n")? },
            other => return Err(Error::Invalid(format!("unknown surgery kind {other:?}"))),
        })
    }
}

fn record_verdicts(before: Option<&InvariantProfile>, after: Option<&InvariantProfile>, rec: &SurgeryRecord) -> Vec<Verdict> {
    let mut v = vec![Verdict::new(
        "surgery_valid",
        &Outcome::from_bool(rec.valid),
        rec.notes.join("; "),
        "validity predicates of the surgery",
    )];
    let mut chi_ok = rec.is_consistent();
    let mut details = format!(
        "Δb2 = {}, Δb3 = {}, Δχ = {}",
        rec.delta_b2, rec.delta_b3, rec.delta_chi
    );
    if let (Some(b), Some(a)) = (before, after) {
        let d = euler_char(a) - euler_char(b);
        chi_ok &= d == rec.delta_chi;
        details.push_str(&format!("; χ: {} → {}", euler_char(b), euler_char(a)));
    }
    v.push(Verdict::new("euler_bookkeeping", &Outcome::from_bool(chi_ok), details, "Δχ = 2Δb2 − Δb3"));
    v
}

pub fn cmd_surgery(source: Option<&str>, params: &SurgeryParams) -> Report {
    let inputs = json!({ "profile": source, "params": format!("{params:?}") });
    wrap("surgery", inputs.clone(), || {
        if let SurgeryParams::AnChain { n } = params {
            let rec = an_chain_record(*n)?;
            let verdicts = record_verdicts(None, None, &rec);
            return Ok(Report::finish("surgery", inputs.clone(), json!({ "record": rec }), verdicts));
        }
        let source = source.ok_or(Error::Missing("profile"))?;
        let (p, _) = ProfileSource::parse(source)?.load()?;
        let (out, rec) = match params {
            SurgeryParams::Conifold { n, r } => conifold_transition(&p, *n, *r)?,
            SurgeryParams::OdpBlowup { r, a } => odp_full_blowup(&p, *r, a)?,
            SurgeryParams::TriplePoint { r } => triple_point_transition(&p, *r)?,
            SurgeryParams::AnChain { .. } => unreachable!("handled above"),
        };
        let verdicts = record_verdicts(Some(&p), Some(&out), &rec);
        let mut results = json!({
            "record": rec,
            "b1": out.b1, "b2": out.b2, "b3": out.b3,
            "euler_char": euler_char(&out),
            "rigid_cy": rigid_cy_check(&out),
            "profile": out.to_json(),
        });
        match c1_cubed(&out) {
            Ok(c3) => results["c1_cubed"] = json!(format_rational(&c3)),
            Err(Error::UnknownProducts(_)) => results["c1_cubed"] = json!("unknown"),
            Err(_) => {}
        }
        Ok(Report::finish("surgery", inputs.clone(), results, verdicts))
    })
}

pub fn cmd_monodromy(source: &str) -> Report {
    let inputs = json!({ "word": source });
    wrap("monodromy", inputs.clone(), || {
        let w = resolve_word(source)?;
        let mut letters = Vec::new();
        for l in w.letters() {
            letters.push(json!({
                "class": l.cls.to_string(),
                "exponent": l.e,
                "twist": dehn_twist(l.cls)?.to_string(),
            }));
        }
        let report = validate_fibration(&w);
        let product = word_product(&w);
        let results = json!({
            "letters": letters,
            "product": product.to_string(),
            "closed": report.closed,
            "euler": report.euler,
        });
        let verdicts = vec![Verdict::new(
            "monodromy_closed",
            &Outcome::from_bool(report.closed),
            format!("product {product}"),
            "product of twists in word order = 1",
        )];
        Ok(Report::finish("monodromy", inputs.clone(), results, verdicts))
    })
}

pub fn cmd_fibre_product(first: &str, second: &str, rule: &str) -> Report {
    let inputs = json!({ "first": first, "second": second, "rule": rule });
    wrap("fibre-product", inputs.clone(), || {
        let (f1, f2) = (resolve_sketch(first)?, resolve_sketch(second)?);
        let g = intersection_graph(&f1, &f2, rule)?;
        let symmetry = if g.vertices.len() == 16 {
            Outcome::from_bool(graph_symmetry_check(&g)?)
        } else {
            Outcome::Skipped(format!("{} vertices (symmetry test needs 16)", g.vertices.len()))
        };
        let results = json!({
            "nodes": count_fibre_product_nodes(&f1, &f2),
            "vertices": g.vertices.len(),
            "edges": g.edges.len(),
            "rule_id": g.rule_id,
            "graph": g.to_json(),
        });
        let verdicts = vec![Verdict::new(
            "sphere_graph_symmetry",
            &symmetry,
            "S3 × S3 × swap",
            "candidate graph; symmetry and vertex count are the checked properties",
        )];
        Ok(Report::finish("fibre-product", inputs.clone(), results, verdicts))
    })
}

pub fn cmd_local_models(seed: u64, samples: usize, n: usize) -> Report {
    let inputs = json!({ "seed": seed, "samples": samples, "n": n });
    wrap("local-models", inputs.clone(), || {
        if samples == 0 || n == 0 {
            return Err(Error::Invalid("samples and n must be positive".into()));
        }
        let r = run_local_models(seed, samples, n)?;
        let verdicts = vec![
            Verdict::new(
                "symplectic_pullback",
                &Outcome::from_bool(r.residual_ok()),
                format!(
                    "max residual {:.3e} (t=0), {:.3e} (t=1), tolerance {RESIDUAL_TOL:e}",
                    r.max_residual, r.max_residual_smoothing
                ),
                "(a_j + ib_j) ↦ (a/|a|, −|a|b) pulls Σdv∧du to Σda∧db",
            ),
            Verdict::new(
                "round_trip",
                &Outcome::from_bool(r.round_trip_ok()),
                format!("max error {:.3e}", r.max_round_trip),
                "global isomorphism T*S^n ≅ {Σz² = t}",
            ),
            Verdict::new(
                "packing_ratio",
                &Outcome::from_bool(r.packing_ok()),
                format!("max |Re z||Im z|/|z|² = {:.15}", r.max_packing_ratio),
                "|z|² ≤ R ⇒ |v| ≤ R/2",
            ),
            Verdict::new(
                "second_order_convergence",
                &Outcome::from_bool(r.second_order()),
                r.convergence
                    .iter()
                    .map(|(h, e)| format!("h={h:e}: {e:.3e}"))
                    .collect::<Vec<_>>()
                    .join(", "),
                "central differences are O(h²)",
            ),
        ];
        Ok(Report::finish("local-models", inputs.clone(), serde_json::to_value(&r)?, verdicts))
    })
}

pub fn cmd_fano_lookup(b2: u32, c1cubed: i64) -> Report {
    let inputs = json!({ "b2": b2, "c1cubed": c1cubed });
    wrap("fano-lookup", inputs.clone(), || {
        let table = fixtures::load_fano_table()?;
        let results = match mori_mukai_lookup(&table, b2, c1cubed)? {
            FanoLookup::Found(labels) => json!({ "found": true, "labels": labels }),
            FanoLookup::Absent => json!({ "found": false }),
        };
        Ok(Report::finish("fano-lookup", inputs.clone(), results, Vec::new()))
    })
}

/// Determinant of the pairing as a float, for quick display.
pub fn det_approx(p: &InvariantProfile, w: &CohomologyClass) -> Option<f64> {
    p.triple.contract(&w.coords).ok()?.det().ok().map(|d| approx(&d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_check_on_fixture_passes() {
        let r = cmd_profile_check("p2xp1", Some("2,1"));
        assert_eq!(r.exit_code, 0, "{}", r.render_text());
        assert!(r.verdicts.iter().all(|v| v.outcome != "fail"));
        assert_eq!(r.results["c1_cubed"], json!("54"));
        assert_eq!(r.results["fano_table"]["found"], json!(["2-33", "2-34"]));
    }

    #[test]
    fn profile_check_salvage_failure() {
        let r = cmd_profile_check("salvage:2,1,1/100,1,0,+", None);
        assert_eq!(r.exit_code, 1);
        let det = r.verdicts.iter().find(|v| v.test == "det_positivity_b2_3").unwrap();
        assert_eq!(det.outcome, "fail");
        let r = cmd_profile_check("salvage:1,2,1/100,1,0,+", None);
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn profile_check_input_errors() {
        let dir = std::env::temp_dir().join(format!("lagsurg-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("no_triple.json");
        std::fs::write(&f, r#"{"name":"x","b1":0,"b2":1,"b3":0,"h4_basis":["a"],"c1":["1"],"omega":["1"]}"#).unwrap();
        assert_eq!(cmd_profile_check(f.to_str().unwrap(), None).exit_code, 2);
        assert_eq!(cmd_profile_check("no-such-fixture", None).exit_code, 2);
        assert_eq!(cmd_profile_check("p2xp1", Some("1")).exit_code, 2);
        assert_eq!(cmd_profile_check("salvage:1,2", None).exit_code, 2);
    }

    #[test]
    fn surgery_reports() {
        let p = SurgeryParams::from_kind("conifold", Some(130), Some(101), None).unwrap();
        let r = cmd_surgery(Some("quintic"), &p);
        assert_eq!(r.exit_code, 0, "{}", r.render_text());
        assert_eq!(r.results["b3"], json!(2));
        assert_eq!(r.results["rigid_cy"], json!(true));

        let p = SurgeryParams::from_kind("triple-point", None, Some(0), None).unwrap();
        let r = cmd_surgery(Some("quintic"), &p);
        assert_eq!(r.results["record"]["delta_chi"], json!(24));

        let p = SurgeryParams::from_kind("an-chain", Some(2), None, None).unwrap();
        let r = cmd_surgery(None, &p);
        assert_eq!(r.results["record"]["params"]["link"], json!("S5"));
        assert_eq!(r.results["record"]["params"]["small_resolution"], json!(false));

        let p = SurgeryParams::from_kind("conifold", Some(3), Some(3), None).unwrap();
        assert_eq!(cmd_surgery(Some("quintic"), &p).exit_code, 1);
        assert!(SurgeryParams::from_kind("flop", None, None, None).is_err());
        let p = SurgeryParams::from_kind("conifold", Some(1), Some(2), None).unwrap();
        assert_eq!(cmd_surgery(Some("quintic"), &p).exit_code, 2);
    }

    #[test]
    fn blowup_report_has_c1_cubed_52() {
        let p = SurgeryParams::from_kind("odp-blowup", None, Some(0), Some("1")).unwrap();
        let r = cmd_surgery(Some("p2xp1"), &p);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.results["b2"], json!(4));
        assert_eq!(r.results["c1_cubed"], json!("52"));
    }

    #[test]
    fn monodromy_and_fibre_reports() {
        let r = cmd_monodromy("e1_four_I3");
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.results["closed"], json!(true));
        assert_eq!(r.results["euler"], json!(12));

        let r = cmd_fibre_product("triple_point", "triple_point", "matching-calculus");
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.results["vertices"], json!(16));
        assert_eq!(r.verdicts[0].outcome, "pass");
        let r = cmd_fibre_product("e1_sketch", "e1_sketch", "matching-calculus");
        assert_eq!(r.results["nodes"], json!(36));
        assert_eq!(cmd_fibre_product("triple_point", "triple_point", "bogus").exit_code, 2);
    }

    #[test]
    fn fano_lookup_report() {
        assert_eq!(cmd_fano_lookup(4, 52).results["found"], json!(false));
        assert_eq!(cmd_fano_lookup(4, 26).results["found"], json!(true));
        assert_eq!(cmd_fano_lookup(0, 26).exit_code, 2);
    }

    #[test]
    fn local_models_report_is_deterministic() {
        let a = cmd_local_models(1, 25, 3).to_json_string();
        let b = cmd_local_models(1, 25, 3).to_json_string();
        assert_eq!(a, b);
        assert_eq!(cmd_local_models(1, 0, 3).exit_code, 2);
    }
}
