use elliptic_fusion::checks::{run_check, Check, Context, Outcome, Registry, Suite};
use elliptic_fusion::rmatrix::ModelParams;
use elliptic_fusion::sampling::Sampler;
use elliptic_fusion::Result;

/// Passes when a uniform draw lands below `cut`.
struct Coin {
    cut: f64,
}

impl Check for Coin {
    fn name(&self) -> &'static str {
        "coin"
    }

    fn suite(&self) -> Suite {
        Suite::Theta
    }

    fn tol(&self) -> f64 {
        self.cut
    }

    fn default_samples(&self) -> usize {
        4
    }

    fn run(&self, _: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
        let worst = (0..k).map(|_| s.unit()).fold(0.0, f64::max);
        Ok(Outcome::new(worst, k))
    }
}

fn ctx() -> Context {
    Context::new(ModelParams::with_defaults(2).unwrap(), 1, 3, 5)
}

#[test]
fn custom_checks_plug_into_a_registry() {
    let mut r = Registry::new();
    r.register(Box::new(Coin { cut: 1.0 }));
    assert_eq!(r.names(), ["coin"]);
    assert_eq!(r.select(Suite::Theta).len(), 1);
    assert!(r.select(Suite::Transfer).is_empty());
    let rec = run_check(r.get("coin").unwrap(), &ctx(), None);
    assert!(rec.pass);
    assert_eq!(rec.samples_used, 4);
    let strict = run_check(r.get("coin").unwrap(), &ctx(), Some(1e-12));
    assert!(!strict.pass);
    assert_eq!(strict.max_residual, rec.max_residual);
}

#[test]
#[should_panic(expected = "registered twice")]
fn duplicate_names_are_refused() {
    let mut r = Registry::new();
    r.register(Box::new(Coin { cut: 1.0 }));
    r.register(Box::new(Coin { cut: 0.5 }));
}

#[test]
fn standard_registry_covers_every_suite() {
    let r = Registry::standard();
    for s in Suite::ALL {
        assert!(!r.select(s).is_empty(), "{s}");
    }
    assert!(r.get("theorem_T_equals_M").is_some());
}

#[test]
fn sample_override_is_honoured() {
    let r = Registry::standard();
    let mut c = ctx();
    c.samples = Some(1);
    let rec = run_check(r.get("dybe").unwrap(), &c, None);
    assert_eq!(rec.samples_used, 1);
    assert!(rec.pass);
}
