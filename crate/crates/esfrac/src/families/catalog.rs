//! The registered families. Parameter names follow the usual symbols; Greek
//! letters are spelled `al`, `be`, `ga`, `om`; `pm` is a sign in {-1, 1}.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{int_of, FamilyDef, FreeVar, Hint, ParamKind, ParamSpec, Step, TermSpec, GRID_MAX};
use crate::arith::{divisors_u64, lcm_u64};
use crate::expr::Env;
use crate::expr::{self, Expr};

fn p(src: &str) -> Expr {
    expr::parse(src).unwrap_or_else(|e| panic!("catalog expression {src:?}: {e}"))
}

struct B(FamilyDef);

fn fam(id: &str, name: &str) -> B {
    let group = id.trim_end_matches(|c: char| c.is_ascii_lowercase()).to_string();
    B(FamilyDef {
        id: id.to_string(),
        group,
        name: name.to_string(),
        params: Vec::new(),
        steps: Vec::new(),
        num: p("1"),
        den: p("1"),
        num_src: String::new(),
        den_src: String::new(),
        terms: Vec::new(),
        free: None,
    })
}

impl B {
    fn param(mut self, name: &str, kind: ParamKind, lo: i64, hi: i64, grid_hi: i64) -> Self {
        self.0.params.push(ParamSpec { name: name.into(), kind, lo, hi, grid_hi, range: None, hint: None });
        self
    }
    fn int(self, name: &str, lo: i64, hi: i64) -> Self {
        self.param(name, ParamKind::Int, lo, hi, GRID_MAX)
    }
    fn int_g(self, name: &str, lo: i64, hi: i64, grid_hi: i64) -> Self {
        self.param(name, ParamKind::Int, lo, hi, grid_hi)
    }
    fn rat(self, name: &str, lo: i64, hi: i64, den_hi: i64) -> Self {
        self.param(name, ParamKind::Rational { den_hi }, lo, hi, GRID_MAX)
    }
    fn list(self, name: &str, len: &str, lo: i64, hi: i64, grid_hi: i64) -> Self {
        self.param(name, ParamKind::List { len: p(len), len_src: len.into() }, lo, hi, grid_hi)
    }
    /// Sampling window for the last declared parameter.
    fn within(mut self, lo: &str, hi: &str) -> Self {
        self.0.params.last_mut().expect("no parameter").range = Some((p(lo), p(hi)));
        self
    }
    fn hint(mut self, h: Hint) -> Self {
        self.0.params.last_mut().expect("no parameter").hint = Some(h);
        self
    }
    fn let_(mut self, name: &str, src: &str) -> Self {
        self.0.steps.push(Step::Let { name: name.into(), expr: p(src), src: src.into() });
        self
    }
    fn guard(mut self, src: &str) -> Self {
        self.0.steps.push(Step::Guard { desc: src.into(), pred: p(src) });
        self
    }
    fn guard_d(mut self, desc: &str, src: &str) -> Self {
        self.0.steps.push(Step::Guard { desc: desc.into(), pred: p(src) });
        self
    }
    fn target(mut self, num: &str, den: &str) -> Self {
        self.0.num = p(num);
        self.0.den = p(den);
        self.0.num_src = num.into();
        self.0.den_src = den.into();
        self
    }
    fn term(self, den: &str) -> Self {
        self.sterm("1", den)
    }
    fn sterm(mut self, sign: &str, den: &str) -> Self {
        let src = if sign == "1" { format!("1/({den})") } else { format!("({sign})/({den})") };
        self.0.terms.push(TermSpec { sign: p(sign), den: p(den), each: None, src });
        self
    }
    fn each(mut self, var: &str, lo: &str, hi: &str, den: &str) -> Self {
        self.0.terms.push(TermSpec {
            sign: p("1"),
            den: p(den),
            each: Some((var.into(), p(lo), p(hi))),
            src: format!("1/({den}) [{var}={lo}..{hi}]"),
        });
        self
    }
    fn free(mut self, name: &str) -> Self {
        self.0.free = Some(FreeVar { name: name.into(), derive: None });
        self
    }
    fn free_derive(mut self, var: &str, param: &str, src: &str) -> Self {
        self.0.free = Some(FreeVar { name: var.into(), derive: Some((param.into(), p(src))) });
        self
    }
    fn done(self) -> FamilyDef {
        self.0
    }
}

/// Template `4/v = 1/((qv+1)/4) + 1/((qv+1)/(4(q-1))) + 1/(v(qv+1)/4)`.
fn q_form(id: &str, name: &str, v: &str, q: &str) -> FamilyDef {
    fam(id, name)
        .int("t", 1, 500)
        .let_("v", v)
        .let_("q", q)
        .guard("q >= 2")
        .guard("v >= 1")
        .target("4", v)
        .term("(q*v+1)/4")
        .term("(q*v+1)/(4*(q-1))")
        .term("v*(q*v+1)/4")
        .free("t")
        .done()
}

fn pick(rng: &mut ChaCha8Rng, xs: Vec<i64>) -> Option<i64> {
    xs.choose(rng).copied()
}

// Sampling hints. Each returns a value satisfying the family's hardest
// divisibility constraints; the domain guards still decide.

fn hint_f17a(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (c, a, b) = (int_of(env, "c")?, int_of(env, "a")?, int_of(env, "b")?);
    let ok = |m: i64| (m + c) % 4 == 0 && ((m + c) * (a + b) * m) % (4 * a * c) == 0 && ((m + c) * (a + b) * m) % (4 * b * c) == 0;
    pick(rng, (1..=400).filter(|&m| ok(m)).collect())
}

fn hint_f17b(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (c, a, b) = (int_of(env, "c")?, int_of(env, "a")?, int_of(env, "b")?);
    let ok = |m: i64| {
        let x = m * c + 1;
        x % 4 == 0 && (x * (a + b)) % (4 * a * c) == 0 && (x * (a + b)) % (4 * b * c) == 0
    };
    pick(rng, (1..=400).filter(|&m| ok(m)).collect())
}

fn hint_f22(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (k, l, e) = (int_of(env, "k")?, int_of(env, "l")?, int_of(env, "e")?);
    let step = k * lcm_u64((e + 1) as u64, (e + 2 * l) as u64) as i64;
    let j = rng.gen_range(1..=6);
    (step * j - 2 * l >= 1).then_some(step * j - 2 * l)
}

fn hint_f48e(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (t, z, v) = (int_of(env, "t")?, int_of(env, "z")?, int_of(env, "v")?);
    let total = v * (4 * (z - 6 * t - 1) + 3);
    let x = (z * v * (24 * t + 1)) as u64;
    pick(rng, divisors_u64(x).into_iter().map(|d| d as i64).filter(|&d| d < total).collect())
}

fn hint_f51(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (r, v, s) = (int_of(env, "r")?, int_of(env, "v")?, int_of(env, "s")?);
    // D | r v w s reduces to D | v s^2 (4rv-1) once r w = (4rv-1)s - D.
    let x = (4 * r * v - 1) * s;
    let ws: Vec<i64> = divisors_u64((v * s * x) as u64)
        .into_iter()
        .map(|d| d as i64)
        .filter(|&d| d < x && (x - d) % r == 0)
        .map(|d| (x - d) / r)
        .collect();
    pick(rng, ws)
}

fn hint_f52_r(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (a, b) = (int_of(env, "a")?, int_of(env, "b")?);
    pick(rng, divisors_u64(((4 * b - 1) * a + b) as u64).into_iter().map(|d| d as i64).collect())
}

fn hint_f52_s(rng: &mut ChaCha8Rng, env: &Env) -> Option<i64> {
    let (a, b, r) = (int_of(env, "a")?, int_of(env, "b")?, int_of(env, "r")?);
    let q = 4 * b - 1;
    let p = q * a + b;
    let ss: Vec<i64> = divisors_u64((p * r) as u64)
        .into_iter()
        .map(|d| d as i64)
        .filter(|&d| (d + r) % q == 0)
        .map(|d| (d + r) / q)
        .collect();
    pick(rng, ss)
}

pub(super) fn build() -> Vec<FamilyDef> {
    vec![
        fam("F01a", "two-part base")
            .int("k", 1, 12)
            .int("q", 1, 40)
            .int("b", 1, 60)
            .guard("k*q > 1")
            .target("k", "(k*q-1)*b")
            .term("b*q")
            .term("(k*q-1)*b*q")
            .free("b")
            .done(),
        fam("F01b", "three-part lcm scaling")
            .int("k", 1, 12)
            .int("b", 1, 30)
            .int("d", 1, 30)
            .int("c", 1, 12)
            .int("q", 1, 20)
            .let_("L", "lcm(b, d)")
            .let_("a", "k*L*q - (b+d)/c")
            .guard("int(a)")
            .guard("a >= 1")
            .target("k", "a")
            .term("L*q")
            .term("L*q*a*c/b")
            .term("L*q*a*c/d")
            .free("q")
            .done(),
        fam("F02", "auxiliary variable: mt-v")
            .int("k", 2, 12)
            .int("m", 1, 12)
            .within("1", "k-1")
            .int("v", 1, 12)
            .int("t", 1, 120)
            .guard("m <= k-1")
            .guard("v | t")
            .guard("m*(t/v) > 1")
            .guard("(k-m) | v")
            .guard("m*t - v > 0")
            .target("k", "m*t-v")
            .term("(m*t-v)/(k-m)")
            .term("t")
            .term("t*(m*t-v)/v")
            .free_derive("r", "t", "v*r")
            .done(),
        fam("F03", "auxiliary variable: split of v")
            .int("k", 1, 12)
            .int("v", 2, 12)
            .within("2", "k")
            .int("z", 1, 11)
            .within("1", "v-1")
            .int("x", 1, 40)
            .guard("v <= k")
            .guard("z <= v-1")
            .let_("l", "lcm(z, v-z)")
            .guard("k*l*x > v")
            .let_("t", "l*x")
            .target("k", "k*t-v")
            .term("t")
            .term("t*(k*t-v)/z")
            .term("t*(k*t-v)/(v-z)")
            .free("x")
            .done(),
        fam("F04", "auxiliary variable: (m/v)/(mt-v)")
            .int("m", 1, 60)
            .int("v", 1, 60)
            .within("1", "m")
            .int("t", 1, 60)
            .guard("v | m")
            .guard("v != m || t >= 2")
            .guard("m*t - v > 0")
            .target("m/v", "m*t-v")
            .term("t*v")
            .term("t*(m*t-v)")
            .free("t")
            .done(),
        fam("F05", "auxiliary variable: r = ld")
            .int("m", 1, 60)
            .int("l", 1, 8)
            .int("d", 1, 8)
            .int("t", 1, 60)
            .let_("r", "l*d")
            .guard("r | m")
            .guard("r != m || l+d != m || t >= 2")
            .guard("m*t - (l+d) > 0")
            .target("m/r", "m*t-(l+d)")
            .term("l*t*(m*t-(l+d))")
            .term("r*t")
            .term("d*t*(m*t-(l+d))")
            .free("t")
            .done(),
        fam("F06", "auxiliary variable: (kw-1)t + (k-1)w - 1")
            .int("k", 1, 12)
            .int("w", 1, 30)
            .int("t", 0, 60)
            .guard("(2*k-1)*w != 1")
            .guard("(2*k-1)*w != 2 || t >= 2")
            .guard("k > 2 || t >= 1")
            .let_("M", "(k*w-1)*t + (k-1)*w - 1")
            .guard("M > 0")
            .target("k", "(k*w-1)*t + (k-1)*w - 1")
            .term("w*(t+1)")
            .term("w*M")
            .term("(t+1)*M")
            .free("t")
            .done(),
        fam("F07", "auxiliary variable: (kw-1)(t-w)")
            .int("k", 1, 12)
            .int("w", 1, 30)
            .int("t", 1, 90)
            .guard("k*w > 1")
            .guard("t > w")
            .target("k", "(k*w-1)*(t-w)")
            .term("w*(t-w)")
            .term("w*t*(k*w-1)")
            .term("t*(k*w-1)*(t-w)")
            .free("t")
            .done(),
        fam("F08", "auxiliary variable: (kw-1)(v-1)")
            .int("k", 1, 12)
            .int("w", 1, 30)
            .int("v", 2, 60)
            .guard("k*w > 1")
            .target("k", "(k*w-1)*(v-1)")
            .term("w*(v-1)")
            .term("v*w*(k*w-1)")
            .term("v*w*(k*w-1)*(v-1)")
            .free("v")
            .done(),
        fam("F09", "auxiliary variable: prime-power A^b")
            .int("A", 2, 12)
            .int("b", 1, 5)
            .int("c", 1, 5)
            .int("n", 1, 60)
            .let_("A1", "rad(A)")
            .guard("A != A1 || (b > c && b != 1)")
            .guard("A == A1 || b >= c")
            .let_("X", "A^b - A1^c - n")
            .guard("X > 0")
            .guard("A1^c | A*X*n")
            .target("A^b", "A*X*n")
            .term("A*n")
            .term("A*X*n/A1^c")
            .term("A*X")
            .done(),
        fam("F10", "auxiliary variable: (krv-l)s - rw")
            .int("k", 1, 6)
            .int("r", 1, 8)
            .int("v", 1, 8)
            .int("l", 1, 8)
            .int("s", 1, 8)
            .int("w", 1, 8)
            .let_("D", "(k*r*v-l)*s - r*w")
            .guard("D > 0")
            .guard("D | r*v*w*l*s")
            .target("k", "w*l")
            .term("r*v*w")
            .term("v*l*s")
            .term("r*v*w*l*s/D")
            .done(),
        fam("F11", "auxiliary variable: signed kmv +- b")
            .int("k", 1, 8)
            .int("m", 1, 8)
            .int("v", 1, 12)
            .int("b", 1, 12)
            .int("s", 1, 8)
            .int_g("pm", -1, 1, 1)
            .guard("pm != 0")
            .let_("N", "k*m*v + pm*b")
            .let_("E", "pm*(v - s*b)")
            .guard("N > 0")
            .guard("E > 0")
            .guard("E | m*v*s*N")
            .target("k", "N")
            .term("m*v")
            .sterm("-pm", "m*s*N")
            .term("m*v*s*N/E")
            .done(),
        fam("F12", "signed corollary: f + g = ry")
            .int("k", 1, 8)
            .int("g", 1, 8)
            .int("x", 1, 8)
            .int("y", 1, 8)
            .int("r", 1, 8)
            .int_g("pm", -1, 1, 1)
            .guard("pm != 0")
            .let_("f", "r*y - g")
            .let_("N", "k*x + pm*y")
            .guard("f > 0")
            .guard("N > 0")
            .guard("f | x*r*g*N")
            .target("k/g", "N")
            .term("x*g")
            .sterm("-pm", "x*r*N")
            .sterm("-pm", "x*r*g*N/f")
            .done(),
        fam("F13", "distributive")
            .int("k", 1, 8)
            .int("z", 1, 8)
            .within("1", "k")
            .int("d", 1, 4)
            .int("n", 1, 200)
            .int("v", 1, 40)
            .int("al", 1, 60)
            .within("1", "(k/z)*d*v - 1")
            .guard("z | k")
            .guard("k | n+v")
            .let_("be", "(k/z)*d*v - al")
            .guard("be >= 1")
            .guard("z*al | d*n*(n+v)")
            .guard("z*be | d*n*(n+v)")
            .target("k", "n")
            .term("(n+v)/k")
            .term("d*n*(n+v)/(z*al)")
            .term("d*n*(n+v)/(z*be)")
            .done(),
        fam("F14", "distributive in t")
            .int("k", 1, 8)
            .int("z", 1, 8)
            .within("1", "k")
            .int("d", 1, 4)
            .int("al", 1, 20)
            .int("be", 1, 20)
            .int("t", 1, 40)
            .guard("z | k")
            .guard("(k/z)*d | al+be")
            .let_("v", "(al+be)/((k/z)*d)")
            .let_("g", "gcd(k, al, be)")
            .let_("m", "k*al*be/g")
            .guard("m > v || (m == v && t >= 2) || (m < v && t > v-m)")
            .guard("m*t - v > 0")
            .target("k", "m*t-v")
            .term("al*be*t/g")
            .term("(m*t-v)*d*k*be*t/(z*g)")
            .term("(m*t-v)*d*k*al*t/(z*g)")
            .free("t")
            .done(),
        fam("F15", "two-part divisor split of 1/n")
            .int("n", 1, 80)
            .int("v", 1, 80)
            .guard("v | n^2")
            .target("1", "n")
            .term("n+v")
            .term("n*(n+v)/v")
            .done(),
        fam("F16", "product rule")
            .int("k", 1, 4)
            .int("a", 1, 720)
            .int_g("L", 1, 3, 2)
            .list("m", "L", 1, 6, 4)
            .list("nn", "L", 1, 6, 4)
            .int_g("R", 1, 3, 2)
            .list("al", "R", 1, 6, 4)
            .let_("S", "sum(i, 1, L, m[i]/nn[i])")
            .let_("n", "a/S")
            .let_("Z", "sum(j, 1, R, al[j])")
            .guard("int(n)")
            .guard("all(i, 1, L-1, k*m[i] | a*nn[i])")
            .guard("all(j, 1, R, k*m[L]*al[j] | a*nn[L]*Z)")
            .target("k", "n")
            .each("i", "1", "L-1", "a*nn[i]/(k*m[i])")
            .each("j", "1", "R", "a*nn[L]*Z/(k*m[L]*al[j])")
            .done(),
        fam("F17a", "Elsholtz-Tao pair, m+c form")
            .int("c", 1, 40)
            .int("a", 1, 12)
            .int("b", 1, 12)
            .int("m", 1, 400)
            .hint(hint_f17a)
            .guard("4 | m+c")
            .guard("4*a*c | (m+c)*(a+b)*m")
            .guard("4*b*c | (m+c)*(a+b)*m")
            .target("4", "m")
            .term("(m+c)/4")
            .term("(m+c)*(a+b)*m/(4*a*c)")
            .term("(m+c)*(a+b)*m/(4*b*c)")
            .done(),
        fam("F17b", "Elsholtz-Tao pair, mc+1 form")
            .int("c", 1, 40)
            .int("a", 1, 12)
            .int("b", 1, 12)
            .int("m", 1, 400)
            .hint(hint_f17b)
            .guard("4 | m*c+1")
            .guard("4*a*c | (m*c+1)*(a+b)")
            .guard("4*b*c | (m*c+1)*(a+b)")
            .target("4", "m")
            .term("(m*c+1)*m/4")
            .term("(m*c+1)*(a+b)/(4*a*c)")
            .term("(m*c+1)*(a+b)/(4*b*c)")
            .done(),
        fam("F18", "lcm partition with rational sizes")
            .int("k", 1, 8)
            .int("e", 1, 30)
            .int("u", 1, 30)
            .int("f", 1, 8)
            .guard("f | e+u")
            .let_("w", "lcm(e, u)")
            .let_("c", "e/f")
            .let_("d", "u/f")
            .let_("N", "k*w - (c+d)")
            .guard("N > 0")
            .target("k", "k*w-(c+d)")
            .term("w")
            .term("(w/c)*N")
            .term("(w/d)*N")
            .done(),
        fam("F19", "lcm partition in t")
            .int("k", 1, 8)
            .int("e", 1, 30)
            .int("u", 1, 30)
            .int("f", 1, 8)
            .int("t", 1, 40)
            .guard("f | e+u")
            .let_("w", "lcm(e, u)")
            .let_("S", "(e+u)/f")
            .guard("k*w > S || (k*w == S && t >= 2) || (k*w < S && t > S-k*w)")
            .let_("N", "k*w*t - S")
            .guard("N > 0")
            .target("k", "k*w*t-(e+u)/f")
            .term("w*t")
            .term("w*t*f*N/e")
            .term("w*t*f*N/u")
            .free("t")
            .done(),
        fam("F20", "two-offset t form")
            .int("k", 1, 8)
            .int("c", 1, 30)
            .int("d", 1, 30)
            .int("t", 1, 40)
            .let_("w", "lcm(c, d)")
            .guard("k*w > c+d || (k*w == c+d && t >= 2) || (k*w < c+d && t > c+d-k*w)")
            .let_("N", "(k*w-c)*t - d")
            .guard("N > 0")
            .target("k", "(k*w-c)*t-d")
            .term("(w/c)*N")
            .term("w*t")
            .term("(w*t/d)*N")
            .free("t")
            .done(),
        fam("F21", "multi-size lcm partition")
            .int("k", 1, 8)
            .int_g("s", 1, 5, 3)
            .list("c", "s", 1, 20, 6)
            .let_("w", "lcmof(i, 1, s, c[i])")
            .let_("v", "k*w - sum(i, 1, s, c[i])")
            .guard("v >= 1")
            .target("k", "v")
            .term("w")
            .each("i", "1", "s", "v*w/c[i]")
            .done(),
        fam("F22", "m-power family")
            .int("k", 1, 6)
            .int("l", 1, 10)
            .int("e", 1, 6)
            .int("m", 1, 40)
            .hint(hint_f22)
            .int("d", 1, 3)
            .int("t", 1, 20)
            .guard("k | m+2*l")
            .let_("W", "(m+2*l)/k")
            .guard("(e+1) | W")
            .guard("(e+2*l) | W")
            .guard("m^d - 1 > e*(m^(d-1)+1) || m^d*t > e*(m^(d-1)+1) + 1")
            .let_("M", "m^(d-1)*(m*t-e) - (e+1)")
            .guard("M > 0")
            .guard("(2*l*t+e) | W*t*M")
            .target("k", "m^(d-1)*(m*t-e)-(e+1)")
            .term("W*t*m^(d-1)")
            .term("W*t*M/(2*l*t+e)")
            .term("W*t*m^(d-1)*M/(e+1)")
            .done(),
        fam("F23", "q-form")
            .int("k", 1, 8)
            .int("q", 2, 12)
            .int("c", 1, 11)
            .within("1", "q-1")
            .int("v", 1, 200)
            .guard("q >= 2")
            .guard("c | q-1")
            .let_("b", "(q*v+c)/k")
            .let_("w", "b/(q-1)")
            .guard("int(b)")
            .guard("int(w)")
            .guard("w >= 1")
            .target("k", "v")
            .term("w")
            .term("b")
            .term("v*b/c")
            .done(),
        fam("F24", "congruence shift, first form")
            .int("k", 1, 8)
            .int("om", 1, 8)
            .int("z", 1, 12)
            .int("y", 1, 20)
            .let_("t", "(k*y-2)*(z-1) + y")
            .guard("t >= 1")
            .guard("k < 3 || z <= (k-2)*om")
            .guard("k != 2 || t > z+1")
            .guard("k != 1 || (om >= 2 && (om-1) | z && t > 2 + z/(om-1))")
            .let_("c", "k*z - (k-1)")
            .let_("m", "k*t - 2")
            .let_("X", "k*om - 1")
            .let_("r", "X*t - (z+om-1)")
            .let_("v", "k*X*t - (2*X + c)")
            .guard("c > 0 && m > 0 && r > 0 && v > 0")
            .target("k", "k*(k*om-1)*((k*y-2)*(z-1)+y) - (2*(k*om-1) + k*z-(k-1))")
            .term("r")
            .term("r*m")
            .term("v*r*m/c")
            .free("y")
            .done(),
        fam("F25", "congruence shift, second form")
            .int("k", 1, 8)
            .int("om", 1, 12)
            .int("l", 1, 8)
            .int("c", 1, 8)
            .int("x", 1, 20)
            .let_("t", "c*x")
            .guard("k < 2 || om*(k-1) > l+c")
            .guard("k != 2 || om > 2")
            .guard("k != 3 || om > 1")
            .guard("k != 1 || (om >= 3 && om > l+c && t >= 2)")
            .let_("v", "k*(k*om-l)*t - k*(om+c) + l")
            .let_("r", "(k*om-l)*t - c")
            .guard("r > 0 && v > 0")
            .target("k", "k*(k*om-l)*c*x - k*(om+c) + l")
            .term("r")
            .term("v*t")
            .term("r*v*t/c")
            .free("x")
            .done(),
        fam("F26", "b divides k")
            .int("k", 1, 12)
            .int("b", 1, 12)
            .within("1", "k")
            .int("w", 1, 30)
            .int("v", 1, 30)
            .within("1", "w")
            .int("t", 1, 40)
            .guard("b | k")
            .guard("v | w")
            .guard("k*w > b")
            .guard("w > v")
            .guard("k*(w-v) > b || (k*(w-v) < b && (k*w-b)*t > k*v)")
            .let_("N", "(k*w-b)*t - k*v")
            .guard("N > 0")
            .target("k/b", "(k*w-b)*t-k*v")
            .term("b*(w*t-v)")
            .term("w*N")
            .term("w*(w*t-v)*N/v")
            .free("t")
            .done(),
        fam("F27", "s-set nesting")
            .int("k", 1, 8)
            .int_g("s", 1, 4, 3)
            .list("b", "s", 1, 12, 6)
            .list("a", "s-1", 1, 6, 6)
            .let_("w", "lcmof(i, 1, s, b[i])")
            .let_("A", "prod(i, 1, s-1, a[i])")
            .let_("v", "k*w*A - sum(i, 1, s, b[i]*prod(j, i, s-1, a[j]))")
            .guard("v >= 1")
            .target("k", "v")
            .term("w*A")
            .each("i", "1", "s", "v*w*prod(j, 1, i-1, a[j])/b[i]")
            .done(),
        fam("F28", "power of a")
            .int("a", 2, 8)
            .int("b", 1, 4)
            .int_g("s", 1, 3, 2)
            .list("c", "s", 1, 4, 6)
            .int("v", 1, 12)
            .int("t", 1, 30)
            .let_("S", "sum(i, 1, s, a^c[i]) + 1")
            .guard("all(i, 1, s, v > b + c[i])")
            .guard("a^v > S || (a^v < S && a^v*t > S)")
            .let_("N", "a^v*t - S")
            .guard("N > 0")
            .target("a^b", "a^v*t - (sum(i, 1, s, a^c[i]) + 1)")
            .term("a^(v-b)*t")
            .each("i", "1", "s", "a^(v-b-c[i])*t*N")
            .term("a^(v-b)*t*N")
            .free("t")
            .done(),
        fam("F29", "kb-1 as a sum of two rationals")
            .int("k", 1, 8)
            .int("b", 1, 20)
            .int("ga", 1, 8)
            .int("l1", 1, 40)
            .guard("k*b > 1")
            .let_("l2", "ga*(k*b-1) - l1")
            .guard("l2 >= 1")
            .let_("L", "lcm(l1, l2)")
            .target("k", "L")
            .term("L*ga*b/l1")
            .term("L*ga*b/l2")
            .term("L*b")
            .done(),
        fam("F30", "kb-1 as a product")
            .int("k", 1, 8)
            .int("b", 1, 60)
            .int("q", 2, 20)
            .guard("q >= 2")
            .let_("v", "(k*b-1)/q")
            .guard("int(v)")
            .guard("v >= 1")
            .guard("(q-1) | b")
            .target("k", "v")
            .term("b/(q-1)")
            .term("b")
            .term("b*v")
            .done(),
        fam("F31", "kb-1 closed form")
            .int("k", 1, 12)
            .int("b", 1, 200)
            .guard("k != 1 || b >= 2")
            .target("k", "k*b-1")
            .term("b")
            .term("k*b^2")
            .term("k*b^2*(k*b-1)")
            .free("b")
            .done(),
        q_form("F32a", "mod-8 q-family, 8t-1", "8*t-1", "8*t+1"),
        q_form("F32b", "mod-8 q-family, 8t-5", "8*t-5", "8*t-3"),
        q_form("F32c", "mod-8 q-family, 24t-7 with q = 8t-1", "24*t-7", "8*t-1"),
        q_form("F32d", "mod-8 q-family, 24t-7 with q = 7", "24*t-7", "7"),
        q_form("F32e", "mod-8 q-family, 24t-19", "24*t-19", "8*t-5"),
        q_form("F32f", "mod-8 q-family, 8t-3", "8*t-3", "3"),
        fam("F33", "Schinzel generalization, 8(2w-1)t - (4w-1)")
            .int("om", 1, 20)
            .int("t", 1, 200)
            .let_("M", "8*(2*om-1)*t - (4*om-1)")
            .let_("q", "4*om-1")
            .target("4", "8*(2*om-1)*t - (4*om-1)")
            .term("(M*q+1)/4")
            .term("(M*q+1)/(4*(4*om-2))")
            .term("(M*q+1)*M/4")
            .free("t")
            .done(),
        fam("F34", "Schinzel generalization, 16wt - (12w+1)")
            .int("om", 1, 20)
            .int("t", 1, 200)
            .let_("M", "16*om*t - (12*om+1)")
            .let_("q", "4*om+1")
            .target("4", "16*om*t - (12*om+1)")
            .term("(M*q+1)/4")
            .term("(M*q+1)/(16*om)")
            .term("M*(M*q+1)/4")
            .free("t")
            .done(),
        fam("F35", "k-generalized Schinzel, k^2 w - 2k")
            .int("k", 1, 10)
            .int("om", 1, 20)
            .int("t", 1, 100)
            .guard("k*om > 2")
            .guard("k >= 3 || (k == 2 && t > (2*om-1)/(4*(om-1))) || (k == 1 && t > (om-1)/(om-2))")
            .let_("M", "(k^2*om - 2*k)*t - (k*om-1)")
            .guard("M > 0")
            .let_("X", "M*(k*om-1) + 1")
            .target("k", "(k^2*om - 2*k)*t - (k*om-1)")
            .term("X/k")
            .term("X/(k*(k*om-2))")
            .term("M*X/k")
            .free("t")
            .done(),
        fam("F36", "k-generalized Schinzel, k^2 w")
            .int("k", 1, 10)
            .int("om", 1, 20)
            .int("t", 1, 100)
            .guard("k != 1 || om*t > 1")
            .let_("M", "k^2*om*t - ((k-1)*k*om + 1)")
            .guard("M > 0")
            .let_("X", "M*(k*om+1) + 1")
            .target("k", "k^2*om*t - ((k-1)*k*om + 1)")
            .term("X/k")
            .term("X/(k^2*om)")
            .term("M*X/k")
            .free("t")
            .done(),
        fam("F37", "triangle special, symmetric")
            .int("om", 1, 20)
            .int("t", 1, 100)
            .let_("M", "4*(4*om-1)*t - (2*(4*om-1)+1)")
            .let_("r", "(4*om-1)*t - om")
            .let_("m", "4*t - 2")
            .target("4", "4*(4*om-1)*t - (2*(4*om-1)+1)")
            .term("r")
            .term("r*m")
            .term("M*r*m")
            .free("t")
            .done(),
        fam("F38", "triangle special, asymmetric")
            .int("om", 1, 20)
            .int("t", 1, 100)
            .let_("M", "4*(4*om-1)*t - (4*om+3)")
            .let_("R", "(4*om-1)*t - 1")
            .target("4", "4*(4*om-1)*t - (4*om+3)")
            .term("R")
            .term("M*t")
            .term("M*R*t")
            .free("t")
            .done(),
        fam("F39", "k-generalized symmetric triangle")
            .int("k", 1, 10)
            .int("om", 1, 20)
            .int("t", 1, 100)
            .guard("k >= 3 || (k == 2 && t > (4*om-1)/(4*om-2)) || (k == 1 && t > (2*om-1)/(om-1))")
            .let_("X", "k*om - 1")
            .let_("M", "k*X*t - (2*X+1)")
            .let_("r", "X*t - om")
            .let_("m", "k*t - 2")
            .guard("M > 0 && r > 0 && m > 0")
            .target("k", "k*(k*om-1)*t - (2*(k*om-1)+1)")
            .term("r")
            .term("r*m")
            .term("M*r*m")
            .free("t")
            .done(),
        fam("F40", "k-generalized asymmetric triangle")
            .int("k", 1, 10)
            .int("a", 1, 10)
            .int("om", 1, 10)
            .int("b", -5, 10)
            .int("t", 1, 60)
            .let_("c", "b + k")
            .let_("A", "a*om + b")
            .guard("A >= 1")
            .guard("t > (a*om+c)/(k*A)")
            .let_("M", "k*A*t - (a*om+c)")
            .let_("R", "A*t - 1")
            .guard("R > 0")
            .target("k", "k*(a*om+b)*t - (a*om+b+k)")
            .term("R")
            .term("M*t")
            .term("M*R*t")
            .free("t")
            .done(),
        fam("F41", "numerical triangle")
            .int("k", 1, 10)
            .int("r", 1, 20)
            .int("t", 1, 100)
            .guard("k != 1 || r >= 2")
            .guard("k != 2 || r != 1 || t >= 2")
            .guard("k != 1 || t > r/(r-1)")
            .let_("X", "k*r - 1")
            .let_("M", "k*X*t - (k*r + k - 1)")
            .let_("R", "X*t - 1")
            .guard("M > 0 && R > 0")
            .target("k", "k*(k*r-1)*t - (k*r+(k-1))")
            .term("R")
            .term("M*t")
            .term("M*R*t")
            .free("t")
            .done(),
        fam("F42a", "real-domain family at rational points")
            .rat("x", 0, 200, 2)
            .guard("int(2*x)")
            .guard("8*x - 1 > 0")
            .target("4", "8*x-1")
            .term("2*x")
            .term("16*x^2")
            .term("16*x^2*(8*x-1)")
            .done(),
        fam("F42b", "real-domain family shifted, 8t-5")
            .int("t", 1, 500)
            .target("4", "8*t-5")
            .term("2*t-1")
            .term("4*(2*t-1)^2")
            .term("4*(2*t-1)^2*(8*t-5)")
            .free("t")
            .done(),
        fam("F42c", "real-domain family shifted, 40t-23")
            .int("t", 1, 500)
            .let_("M", "40*t-23")
            .target("4", "40*t-23")
            .term("5*(2*t-1)")
            .term("2*(2*t-1)*M")
            .term("10*(2*t-1)*M")
            .free("t")
            .done(),
        fam("F43", "triangular numbers")
            .int("n", 1, 2000)
            .guard("n % 4 == 3")
            .target("4", "n")
            .term("(n+1)/4")
            .term("binom(n+1, 2)")
            .term("binom(n+1, 2)")
            .free_derive("t", "n", "4*t-1")
            .done(),
        fam("F44", "natural sizes")
            .int("r", 1, 20)
            .int("rp", 1, 20)
            .within("1", "r")
            .int("t", 1, 60)
            .guard("rp <= r")
            .let_("W", "rp*(2*r - rp + 1)")
            .let_("M", "4*W*t - (2*r+1)")
            .guard("M > 0")
            .target("4", "4*rp*(2*r-(rp-1))*t - (2*r+1)")
            .term("W*t")
            .term("rp*t*M")
            .term("(2*r-rp+1)*t*M")
            .free("t")
            .done(),
        fam("F45", "modular ladder for 4t+1")
            .int("a", 1, 8)
            .int("z", 0, 8)
            .int("j", 0, 7)
            .within("0", "a-1")
            .int("t", 1, 500)
            .guard("j < a")
            .let_("u", "a*z + j")
            .guard("u >= 1")
            .guard("(3*u-1) | (t+1)*u*(4*t+1)")
            .target("4", "4*t+1")
            .term("t+1")
            .term("(t+1)*u*(4*t+1)")
            .term("(t+1)*u*(4*t+1)/(3*u-1)")
            .done(),
        fam("F46", "modular equation, 40t-23")
            .int("t", 1, 500)
            .let_("M", "40*t-23")
            .target("4", "40*t-23")
            .term("5*(2*t-1)")
            .term("2*(2*t-1)*M")
            .term("10*(2*t-1)*M")
            .free("t")
            .done(),
        fam("F47", "modular equation, 40t-3")
            .int("t", 1, 500)
            .let_("M", "40*t-3")
            .target("4", "40*t-3")
            .term("10*t")
            .term("5*t*M")
            .term("10*t*M")
            .free("t")
            .done(),
        fam("F48a", "mod-4 kit, two parts for 4x-2")
            .int("x", 1, 500)
            .target("4", "4*x-2")
            .term("x")
            .term("x*(2*x-1)")
            .free("x")
            .done(),
        fam("F48b", "mod-4 kit, two parts for 4x")
            .int("x", 1, 500)
            .target("4", "4*x")
            .term("2*x")
            .term("2*x")
            .free("x")
            .done(),
        fam("F48c", "mod-4 kit, n = -1 mod 4 with (c-1)/c split")
            .int("z", 1, 200)
            .int("c", 2, 30)
            .guard("c >= 2")
            .let_("n", "4*z-1")
            .guard("(c-1) | c*n*z")
            .target("4", "4*z-1")
            .term("z")
            .term("c*n*z/(c-1)")
            .term("c*n*z")
            .done(),
        fam("F48d", "mod-4 kit, n = -3 mod 4 with splits of 3")
            .int("z", 1, 200)
            .int_g("f", 1, 3, 3)
            .int("g", 1, 20)
            .guard("f <= 3")
            .let_("n", "4*z-3")
            .let_("h", "3*g - f")
            .guard("h >= 1")
            .guard("f | n*z*g")
            .guard("h | n*z*g")
            .target("4", "4*z-3")
            .term("z")
            .term("n*z*g/f")
            .term("n*z*g/h")
            .done(),
        fam("F48e", "mod-4 kit, 24t+1 general form")
            .int("t", 1, 20)
            .int("z", 1, 240)
            .within("6*t+1", "12*t")
            .int("v", 1, 12)
            .int("m", 1, 60)
            .hint(hint_f48e)
            .guard("6*t+1 <= z && z <= 12*t")
            .let_("N", "24*t+1")
            .let_("y", "z - 6*t - 1")
            .let_("np", "v*(4*y+3) - m")
            .guard("np >= 1")
            .guard("m | z*v*N")
            .guard("np | z*v*N")
            .target("4", "24*t+1")
            .term("z")
            .term("z*v*N/m")
            .term("z*v*N/np")
            .done(),
        fam("F49a", "splitting-tree equation, 120t-23")
            .int("t", 1, 500)
            .let_("M", "120*t-23")
            .target("4", "120*t-23")
            .term("5*(6*t-1)")
            .term("10*t*M")
            .term("10*t*(6*t-1)*M")
            .free("t")
            .done(),
        fam("F49b", "splitting-tree equation, 40v-7")
            .int("v", 1, 500)
            .let_("M", "40*v-7")
            .target("4", "40*v-7")
            .term("10*v")
            .term("5*v*M")
            .term("2*v*M")
            .free("v")
            .done(),
        fam("F50", "8t+1 family with 4b-1 | 2r+b")
            .int("b", 1, 20)
            .int("r", 0, 80)
            .within("0", "4*b-2")
            .int("t", 0, 60)
            .guard("r < 4*b-1")
            .guard("(4*b-1) | 2*r+b")
            .let_("T", "(4*b-1)*t + r")
            .let_("N", "8*T+1")
            .guard("N > 1")
            .target("4", "8*((4*b-1)*t+r)+1")
            .term("b*(8*T+2)")
            .term("b*N/(4*b-1)")
            .term("b*(8*T+2)*N")
            .free("t")
            .done(),
        fam("F51", "key equation for 4/w")
            .int("r", 1, 12)
            .int("v", 1, 80)
            .int("s", 1, 40)
            .int("w", 1, 300)
            .hint(hint_f51)
            .let_("D", "(4*r*v-1)*s - r*w")
            .guard_d("divisor is zero", "D != 0")
            .guard("D > 0")
            .guard("D | r*v*w*s")
            .target("4", "w")
            .term("r*v*w")
            .term("v*s")
            .term("r*v*w*s/D")
            .done(),
        fam("F52", "key equation with rv = ((4b-1)w+1)/4")
            .int("a", 1, 100)
            .int("b", 1, 12)
            .int("r", 1, 60)
            .hint(hint_f52_r)
            .int("s", 1, 60)
            .hint(hint_f52_s)
            .let_("w", "4*a+1")
            .let_("P", "(4*b-1)*a + b")
            .guard("r | P")
            .let_("v", "P/r")
            .let_("D", "(4*b-1)*s - r")
            .guard("D > 0")
            .guard("D | P*s")
            .target("4", "4*a+1")
            .term("P*w")
            .term("v*s")
            .term("P*s/D")
            .done(),
        fam("F53a", "lcm triple")
            .int("a", 1, 40)
            .int("b", 1, 40)
            .int("c", 1, 40)
            .int("d", 1, 6)
            .guard("gcd(a, b, c) == 1")
            .guard("4 | a+b+c")
            .let_("G", "gcd(a*b, a*c, b*c)")
            .let_("n", "d*lcm(a, b, c)/((a+b+c)/4)")
            .guard("int(n)")
            .target("4*d", "n*G")
            .term("b*c")
            .term("a*c")
            .term("a*b")
            .done(),
        fam("F53b", "lcm v-term generalization")
            .int("k", 1, 8)
            .int("d", 1, 6)
            .int_g("vv", 1, 4, 3)
            .list("a", "vv", 1, 12, 6)
            .let_("l", "prod(i, 1, vv, a[i])")
            .let_("G", "gcdof(i, 1, vv, l/a[i])")
            .let_("S", "sum(i, 1, vv, a[i])")
            .guard("gcdof(i, 1, vv, a[i]) == 1")
            .guard("k | S")
            .let_("n", "d*lcmof(i, 1, vv, a[i])/(S/k)")
            .guard("int(n)")
            .target("k*d", "n*G")
            .each("i", "1", "vv", "l/a[i]")
            .done(),
    ]
}
