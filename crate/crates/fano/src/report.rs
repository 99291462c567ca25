//! Uniform pass/fail records for every checked statement, with JSON and CSV output.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Claim identifiers with a one-line statement of what is checked.
pub const CLAIMS: &[(&str, &str)] = &[
    ("discriminant-order", "det(zQ + P_v) restricted to V vanishes to order 4-k at z = 0 and has residual degree 6"),
    ("dual-sextic", "the dual points of the quadric system lie on a unique sextic"),
    ("dual-multiplicity", "the dual sextic has multiplicity k at the Plücker point"),
    ("projective-duality", "gradients of each sextic at its smooth points lie on the other sextic"),
    ("lagrangian", "the graph subspace A is Lagrangian and its degeneracy locus is the dual sextic"),
    ("singular-locus", "corank-two members give double points of the dual sextic"),
    ("no-corank-three", "no pencil member has corank three or more"),
    ("containment-sw", "the corank-two locus of W lies on the dual sextic of Z"),
    ("containment-sx", "the corank-two locus of X lies on the dual sextic of Z"),
    ("gushel", "for cone instances the two sextics agree and the flattening limit matches the cone discriminant"),
    ("no-planes", "a general k = 1 instance contains no planes"),
    ("conic-class", "sampled conics on Z are smooth τ-conics"),
    ("conic-alpha", "the pencil member containing a conic is unique and recovered from the conic"),
    ("conic-partner", "the residual partner conic shares V4 and the member, and its plane meets the original in a line"),
    ("conic-kappa", "the linear syzygy pencil is base point free on the conic"),
    ("special-families", "ρ-planes in H contain the kernel and σ-planes have isotropic V4"),
    ("tangent-conic", "the Hilbert scheme of conics has the expected tangent dimension"),
    ("tangent-double-line", "double lines on G have a 13-dimensional tangent space"),
    ("splitting-type", "the normal bundle of a conic splits as expected"),
    ("appendix-oracle", "the eight forms and the 13x8 matrix agree with an independent symbolic computation"),
    ("appendix-rank", "the 13x8 matrix drops rank with frequency bounded by 10/p^3"),
    ("bott-chi", "Euler characteristic from the Bott and Koszul chains"),
    ("hodge", "vanishing on G and the middle Hodge numbers of Z"),
];

pub fn statement(claim: &str) -> &'static str {
    CLAIMS
        .iter()
        .find(|(c, _)| *c == claim)
        .map_or("", |(_, s)| s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub statement: String,
    pub instance_digest: Option<String>,
    pub seed: u64,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub witnesses: Vec<Value>,
    pub details: Value,
    /// Kept apart from the deterministic content.
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(claim: &str, digest: Option<String>, seed: u64) -> Self {
        VerificationReport {
            claim: claim.to_string(),
            statement: statement(claim).to_string(),
            instance_digest: digest,
            seed,
            trials: 0,
            passes: 0,
            failures: 0,
            witnesses: Vec::new(),
            details: Value::Null,
            wall_time_ms: None,
        }
    }

    /// Count one trial; failing trials keep their witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.trials += 1;
        if ok {
            self.passes += 1;
        } else {
            self.failures += 1;
            self.witnesses.push(witness());
        }
    }

    pub fn tally(&mut self, trials: usize, failures: usize) {
        let failures = failures.min(trials);
        self.trials += trials;
        self.failures += failures;
        self.passes += trials - failures;
    }

    pub fn with_details<T: Serialize>(mut self, d: &T) -> Self {
        self.details = serde_json::to_value(d).unwrap_or(Value::Null);
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    /// JSON without the wall time, identical across reruns.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.wall_time_ms = None;
        serde_json::to_string_pretty(&c).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.claim,
            self.instance_digest.as_deref().unwrap_or(""),
            self.seed,
            self.trials,
            self.passes,
            self.failures,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

pub const CSV_HEADER: &str = "claim,instance_digest,seed,trials,passes,failures,status";

pub fn summary_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn counts_add_up() {
        let mut r = VerificationReport::new("hodge", None, 3);
        r.record(true, || json!(null));
        r.record(false, || json!({"at": 1}));
        r.tally(5, 0);
        assert_eq!((r.trials, r.passes, r.failures), (7, 6, 1));
        assert_eq!(r.witnesses.len(), 1);
        assert!(!r.passed());
    }

    #[test]
    fn empty_report_does_not_pass() {
        assert!(!VerificationReport::new("hodge", None, 0).passed());
    }

    #[test]
    fn canonical_json_ignores_wall_time() {
        let mut a = VerificationReport::new("gushel", Some("ab".into()), 1);
        a.tally(2, 0);
        let mut b = a.clone();
        a.wall_time_ms = Some(10);
        b.wall_time_ms = Some(99);
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_ne!(a.to_json(), b.to_json());
        let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn every_claim_has_a_statement() {
        for (c, s) in CLAIMS {
            assert!(!s.is_empty());
            assert_eq!(statement(c), *s);
        }
        assert_eq!(statement("nope"), "");
    }

    #[test]
    fn csv_layout() {
        let mut r = VerificationReport::new("no-planes", Some("d".into()), 4);
        r.tally(3, 0);
        let csv = summary_csv(&[r]);
        assert_eq!(csv, format!("{CSV_HEADER}\nno-planes,d,4,3,3,0,pass\n"));
    }
}
