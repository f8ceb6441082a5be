use super::{Expr, Func, Node};

pub(super) fn differentiate(e: &Expr, var: usize) -> Expr {
    if e.arity() <= var {
        return Expr::int(0);
    }
    let span = e.span();
    match e.node() {
        Node::Const(_) => Expr::int(0),
        Node::Var(i) => Expr::int(if *i == var { 1 } else { 0 }),
        Node::Neg(a) => Expr::neg(differentiate(a, var), span),
        Node::Add(a, b) => Expr::add(differentiate(a, var), differentiate(b, var), span),
        Node::Sub(a, b) => Expr::sub(differentiate(a, var), differentiate(b, var), span),
        Node::Mul(a, b) => Expr::add(
            Expr::mul(differentiate(a, var), b.clone(), span),
            Expr::mul(a.clone(), differentiate(b, var), span),
            span,
        ),
        Node::Div(a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            if db.constant().is_some_and(|c| c.is_zero()) {
                return Expr::div(da, b.clone(), span);
            }
            // (a'b - ab') / b^2
            let num = Expr::sub(
                Expr::mul(da, b.clone(), span),
                Expr::mul(a.clone(), db, span),
                span,
            );
            Expr::div(num, Expr::pow(b.clone(), 2, span), span)
        }
        Node::Pow(a, m) => {
            let da = differentiate(a, var);
            let outer = Expr::mul(Expr::int(i64::from(*m)), Expr::pow(a.clone(), m - 1, span), span);
            Expr::mul(outer, da, span)
        }
        Node::Call(f, a) => {
            let da = differentiate(a, var);
            if da.constant().is_some_and(|c| c.is_zero()) {
                return Expr::int(0);
            }
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a.clone(), span),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone(), span), span),
                Func::Exp => e.clone(),
                Func::Log => Expr::div(Expr::int(1), a.clone(), span),
                // 1 / (2 sqrt(a)); keeps the original span for domain errors
                Func::Sqrt => Expr::div(Expr::int(1), Expr::mul(Expr::int(2), e.clone(), span), span),
            };
            Expr::mul(outer, da, span)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn check(src: &str, dim: usize, var: usize, point: &[f64], expected: f64) {
        let d = parse(src, dim).unwrap().differentiate(var);
        let got = d.evaluate(point).unwrap();
        assert!((got - expected).abs() < 1e-12, "{src}: {got} vs {expected}");
    }

    #[test]
    fn table_rules() {
        check("cos(x1)", 1, 0, &[0.5], -(0.5f64).sin());
        check("log(x1)", 1, 0, &[4.0], 0.25);
        check("sqrt(x1)", 1, 0, &[4.0], 0.25);
        check("exp(x1^2)", 1, 0, &[1.0], 2.0 * 1f64.exp());
        check("1/x1", 1, 0, &[2.0], -0.25);
        check("x1^(-2)", 1, 0, &[2.0], -0.25);
        check("x2/x1", 2, 1, &[2.0, 7.0], 0.5);
    }

    #[test]
    fn unused_variable_gives_zero() {
        let d = parse("sin(x1)*x2", 3).unwrap().differentiate(2);
        assert_eq!(d.constant().map(|c| c.to_f64()), Some(0.0));
        let d = parse("sin(x1)*x2", 3).unwrap().differentiate(0);
        assert!(d.constant().is_none());
    }

    #[test]
    fn derivative_keeps_span_for_domain_errors() {
        let e = parse("log(x1)", 1).unwrap();
        let err = e.differentiate(0).evaluate(&[0.0]).unwrap_err();
        assert!(err.to_string().contains("0..7"), "{err}");
    }
}
