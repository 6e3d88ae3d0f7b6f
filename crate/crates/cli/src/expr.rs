//! Potentials given as arithmetic expressions in `t, q1, q2, q3`.

use galimech_core::potential::Potential;
use galimech_core::Event;
use meval::{Context, Expr};

thread_local! {
    static BUILTINS: Context<'static> = Context::new();
}

const VARIABLES: [&str; 4] = ["t", "q1", "q2", "q3"];

#[derive(Debug, Clone)]
pub struct ExprPotential {
    source: String,
    expr: Expr,
    time_independent: bool,
}

impl ExprPotential {
    /// Parses the expression and checks that it only uses known names.
    pub fn parse(source: &str) -> Result<Self, meval::Error> {
        let expr: Expr = source.parse()?;
        let p = ExprPotential {
            source: source.to_owned(),
            expr,
            time_independent: !identifiers(source).any(|id| id == "t"),
        };
        p.try_value(&Event::origin())?;
        Ok(p)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn try_value(&self, x: &Event) -> Result<f64, meval::Error> {
        let c = x.coords();
        let vars = [(VARIABLES[0], c[0]), (VARIABLES[1], c[1]), (VARIABLES[2], c[2]), (VARIABLES[3], c[3])];
        BUILTINS.with(|builtins| self.expr.eval_with_context((vars, builtins)))
    }
}

fn identifiers(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| w.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_'))
}

impl Potential for ExprPotential {
    fn value(&self, x: &Event) -> f64 {
        self.try_value(x).unwrap_or(f64::NAN)
    }

    fn is_time_independent(&self) -> bool {
        self.time_independent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_with_builtins() {
        let p = ExprPotential::parse("sin(q1) + exp(q2) * cos(t) + 2^q3 - pi").unwrap();
        let x = Event::new(0.0, 0.5, 0.0, 3.0);
        assert!((p.value(&x) - (0.5f64.sin() + 1.0 + 8.0 - std::f64::consts::PI)).abs() < 1e-14);
        assert!(!p.is_time_independent());
    }

    #[test]
    fn time_independence_is_detected() {
        assert!(ExprPotential::parse("q1*q1 + q2/2").unwrap().is_time_independent());
        assert!(!ExprPotential::parse("t*q1").unwrap().is_time_independent());
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(ExprPotential::parse("x + 1").is_err());
        assert!(ExprPotential::parse("foo(q1)").is_err());
        assert!(ExprPotential::parse("q1 +").is_err());
    }

    #[test]
    fn gradient_by_finite_differences() {
        let p = ExprPotential::parse("0.5 * (q1^2 + 4*q2^2)").unwrap();
        let g = p.gradient(&Event::new(0.0, 1.0, 0.5, 0.0));
        assert!((g.0[1] - 1.0).abs() < 1e-8 && (g.0[2] - 2.0).abs() < 1e-8);
    }
}
