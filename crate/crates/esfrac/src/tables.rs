//! Witness tables: `(b, r, v, s)` rows for primes `w = 4a+1` under the key
//! equation `4/w = 1/(rvw) + 1/(vs) + 1/(rvws/((4rv-1)s - rw))`, size
//! witnesses, and the `m = 1 (mod 840)` search over the two `(a, b, c)` forms.

use std::path::Path;

use serde::Serialize;

use crate::arith::{divisors_u64, factor_u64, is_prime_u64, Integer};
use crate::coverage::{integer_size_reachable, rational_size_reachable, IntWitness, RatWitness};
use crate::egyptian::{DecompRecord, RecordJson};
use crate::error::{domain, Error, Result};
use crate::families::{self, binding};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrvsRow {
    pub w: u64,
    pub b: u64,
    pub r: u64,
    pub v: u64,
    pub s: u64,
    /// `rvws / ((4rv-1)s - rw)` when that is a positive integer.
    #[serde(serialize_with = "opt_str")]
    pub third: Option<Integer>,
    pub verified: bool,
}

fn opt_str<S: serde::Serializer>(x: &Option<Integer>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl BrvsRow {
    /// Builds the row and decides `verified` by arithmetic.
    pub fn new(w: u64, b: u64, r: u64, v: u64, s: u64) -> Self {
        let mut row = BrvsRow { w, b, r, v, s, third: None, verified: false };
        let (wi, ri, vi, si) = (Integer::from(w), Integer::from(r), Integer::from(v), Integer::from(s));
        let d = (Integer::from(4u32) * &ri * &vi - 1u32) * &si - &ri * &wi;
        let top = &ri * &vi * &wi * &si;
        if d > Integer::from(0u32) && (&top % &d) == Integer::from(0u32) {
            row.third = Some(top / d);
        }
        row.verified = verify_brvs_row(&row);
        row
    }

    pub fn record(&self) -> Result<DecompRecord> {
        let p = |x: u64| i64::try_from(x).map_err(|_| Error::Domain(format!("{x} exceeds i64")));
        families::evaluate("F51", &binding(&[("r", p(self.r)?), ("v", p(self.v)?), ("s", p(self.s)?), ("w", p(self.w)?)]))
    }
}

/// True iff `4rv = (4b-1)w + 1`, `(4rv-1)s - rw > 0` divides `rvws`, and the
/// key-equation family evaluates and verifies at `(r, v, s, w)`.
pub fn verify_brvs_row(row: &BrvsRow) -> bool {
    let (w, b, r, v, s) = (row.w as u128, row.b as u128, row.r as u128, row.v as u128, row.s as u128);
    if w == 0 || b == 0 || r == 0 || v == 0 || s == 0 || 4 * r * v != (4 * b - 1) * w + 1 {
        return false;
    }
    let lhs = (4 * r * v - 1) * s;
    if lhs <= r * w || (r * v * w * s) % (lhs - r * w) != 0 {
        return false;
    }
    row.record().map(|rec| rec.verified()).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BrvsCaps {
    pub b_max: u64,
    pub s_max: u64,
}

impl Default for BrvsCaps {
    fn default() -> Self {
        BrvsCaps { b_max: 64, s_max: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BrvsSearch {
    Found { row: BrvsRow },
    NoneWithinBounds { w: u64, caps: BrvsCaps },
}

impl BrvsSearch {
    pub fn row(&self) -> Option<&BrvsRow> {
        match self {
            BrvsSearch::Found { row } => Some(row),
            BrvsSearch::NoneWithinBounds { .. } => None,
        }
    }
}

/// Smallest `s` for `rv = P`: with `D = (4b-1)s - r`, `D | Ps` forces
/// `D | Pr`, so `D` runs over divisors of `Pr` with `D = -r (mod 4b-1)`.
fn smallest_s(p: u64, r: u64, b: u64, s_max: u64) -> Option<u64> {
    let m = 4 * b - 1;
    let pr = p as u128 * r as u128;
    let mut f = factor_u64(p);
    for (q, e) in factor_u64(r) {
        match f.iter_mut().find(|(x, _)| *x == q) {
            Some(slot) => slot.1 += e,
            None => f.push((q, e)),
        }
    }
    let limit = m as u128 * s_max as u128 - r as u128;
    crate::arith::divisors_from(&f)
        .into_iter()
        .map(|d| d as u128)
        .filter(|&d| d <= limit && pr % d == 0 && (d + r as u128) % m as u128 == 0)
        .map(|d| ((d + r as u128) / m as u128, d))
        .filter(|&(s, d)| (p as u128 * s) % d == 0)
        .map(|(s, _)| s as u64)
        .min()
}

/// Lexicographically smallest `(b, r, v, s)` with `rv = ((4b-1)w+1)/4`.
pub fn search_brvs(w: u64, caps: BrvsCaps) -> Result<BrvsSearch> {
    if w % 4 != 1 || !is_prime_u64(w) {
        return domain(format!("search_brvs needs a prime w = 1 (mod 4), got {w}"));
    }
    for b in 1..=caps.b_max {
        let p = ((4 * b - 1) * w + 1) / 4;
        for r in divisors_u64(p) {
            if let Some(s) = smallest_s(p, r, b, caps.s_max) {
                let row = BrvsRow::new(w, b, r, p / r, s);
                if !row.verified {
                    return Err(Error::IdentityViolation(format!("search produced an unverified row {row:?}")));
                }
                return Ok(BrvsSearch::Found { row });
            }
        }
    }
    Ok(BrvsSearch::NoneWithinBounds { w, caps })
}

/// Primes `w = 1 (mod 4)` up to `max`, or only those `= 1 (mod 120)`.
pub fn brvs_primes(only_120: bool, max: u64) -> Vec<u64> {
    let step = if only_120 { 120 } else { 4 };
    (1..).map(|i| step * i + 1).take_while(|&w| w <= max).filter(|&w| is_prime_u64(w)).collect()
}

pub fn search_brvs_many(ws: &[u64], caps: BrvsCaps) -> Result<Vec<BrvsSearch>> {
    par::map(ws.to_vec(), |w| search_brvs(w, caps)).into_iter().collect()
}

/// The printed rows for primes `4a+1` up to 1009, as `[w, b, r, v, s]`.
pub const PRINTED_4A1: [[u64; 5]; 81] = [
    [5, 1, 1, 4, 1], [13, 1, 1, 10, 1], [17, 2, 1, 30, 1], [29, 1, 1, 22, 1], [37, 1, 1, 28, 1],
    [41, 2, 1, 72, 1], [53, 1, 1, 40, 1], [61, 1, 1, 46, 1], [73, 1, 1, 55, 2], [89, 2, 2, 78, 2],
    [97, 2, 2, 85, 1], [101, 1, 1, 76, 1], [109, 1, 1, 82, 1], [113, 1, 1, 85, 2],
    [137, 2, 3, 80, 1], [149, 1, 2, 56, 1], [157, 1, 2, 59, 1], [173, 1, 2, 65, 1],
    [181, 1, 2, 68, 1], [193, 1, 5, 29, 2], [197, 1, 2, 74, 1], [229, 1, 2, 86, 1],
    [233, 1, 5, 35, 2], [241, 6, 14, 99, 1], [257, 2, 5, 90, 1], [269, 3, 10, 74, 1],
    [277, 1, 4, 52, 2], [281, 2, 6, 82, 1], [293, 1, 4, 55, 2], [313, 1, 5, 47, 2],
    [317, 1, 7, 34, 3], [337, 1, 11, 23, 44], [349, 2, 13, 47, 26], [353, 1, 5, 53, 21],
    [373, 1, 4, 70, 2], [389, 1, 4, 73, 2], [397, 3, 12, 91, 3], [401, 2, 9, 78, 5],
    [409, 4, 26, 59, 2], [421, 1, 4, 79, 2], [433, 1, 5, 65, 2], [449, 3, 13, 95, 78],
    [457, 2, 8, 100, 4], [461, 5, 30, 73, 40], [509, 2, 9, 99, 6], [521, 1, 17, 23, 6],
    [541, 1, 7, 58, 3], [557, 1, 11, 38, 10], [569, 2, 12, 83, 2], [577, 6, 42, 79, 21],
    [593, 1, 5, 89, 2], [601, 1, 11, 41, 44], [613, 1, 4, 115, 2], [617, 2, 6, 180, 2],
    [641, 2, 6, 187, 4], [653, 1, 5, 98, 2], [661, 1, 4, 124, 2], [673, 1, 5, 101, 10],
    [677, 1, 4, 127, 2], [701, 5, 37, 90, 37], [709, 1, 7, 76, 3], [733, 1, 10, 55, 5],
    [757, 1, 8, 71, 4], [761, 2, 18, 74, 6], [769, 4, 1, 2884, 1], [773, 1, 1, 580, 1],
    [797, 1, 1, 598, 1], [809, 2, 3, 472, 1], [821, 1, 2, 308, 1], [829, 1, 2, 311, 1],
    [853, 1, 2, 320, 1], [857, 2, 3, 500, 1], [877, 1, 2, 329, 1], [881, 2, 6, 257, 6],
    [929, 1, 1, 697, 6], [937, 2, 2, 820, 1], [941, 1, 1, 706, 1], [953, 1, 1, 715, 2],
    [977, 2, 2, 855, 1], [997, 1, 1, 748, 1], [1009, 4, 4, 946, 1],
];

/// The printed rows for primes `120a+1` up to 24481.
pub const PRINTED_120A1: [[u64; 5]; 78] = [
    [241, 6, 66, 21, 33], [601, 3, 87, 19, 58], [1201, 40, 385, 124, 11], [1321, 234, 336, 919, 21],
    [1801, 30, 190, 282, 38], [2161, 24, 188, 273, 43], [2281, 4, 94, 91, 47],
    [2521, 9, 817, 27, 38], [3001, 8, 802, 29, 401], [3121, 4, 44, 266, 11],
    [3361, 36, 124, 969, 1], [4201, 6, 33, 732, 3], [4441, 6, 28, 912, 4], [4561, 1, 11, 311, 44],
    [4801, 4, 28, 643, 28], [5281, 1, 17, 233, 102], [5521, 1, 41, 101, 574], [5641, 6, 34, 954, 2],
    [5881, 1, 11, 401, 44], [6121, 2, 13, 824, 3], [6361, 3, 21, 833, 42], [6481, 4, 28, 868, 4],
    [6841, 2, 4, 2993, 11], [6961, 1, 23, 227, 184], [7321, 1, 17, 323, 12],
    [7561, 1, 53, 107, 954], [7681, 2, 22, 611, 5], [8161, 6, 54, 869, 54], [8521, 1, 7, 913, 6],
    [8641, 6, 78, 637, 39], [8761, 5, 203, 205, 232], [9001, 6, 57, 908, 190],
    [9241, 1, 29, 239, 290], [9601, 2, 31, 542, 279], [9721, 1, 23, 317, 184],
    [10321, 4, 41, 944, 164], [11161, 1, 11, 761, 44], [12241, 3, 49, 687, 98],
    [12601, 27, 559, 603, 86], [12721, 1, 29, 329, 290], [12841, 6, 84, 879, 6],
    [13441, 1, 17, 593, 102], [13681, 4, 53, 968, 159], [13921, 1, 53, 197, 954],
    [14281, 3, 53, 741, 10], [14401, 3, 43, 921, 172], [15121, 5, 85, 845, 90],
    [15241, 1, 23, 497, 184], [15361, 1, 41, 281, 574], [15601, 2, 34, 803, 8],
    [16561, 3, 51, 893, 34], [16921, 8, 133, 986, 342], [17041, 2, 31, 962, 15],
    [17401, 3, 117, 409, 26], [17761, 1, 77, 173, 66], [17881, 6, 108, 952, 12],
    [18121, 3, 63, 791, 16], [18481, 6, 267, 398, 356], [19081, 4, 133, 538, 57],
    [19441, 4, 104, 701, 52], [19681, 1, 29, 509, 290], [19801, 9, 207, 837, 414],
    [20161, 2, 46, 767, 14], [20521, 16, 401, 806, 401], [20641, 3, 63, 901, 126],
    [21001, 4, 338, 233, 169], [21121, 3, 57, 1019, 38], [21481, 3, 21, 2813, 42],
    [21601, 1, 17, 953, 102], [21841, 28, 158, 3836, 395], [21961, 3, 123, 491, 164],
    [22441, 9, 87, 2257, 12], [22921, 5, 65, 1675, 10], [23041, 9, 513, 393, 228],
    [23761, 1, 71, 251, 1704], [24001, 1, 47, 383, 752], [24121, 2, 122, 346, 549],
    [24481, 2, 62, 691, 558],
];

pub fn printed_rows() -> Vec<BrvsRow> {
    PRINTED_4A1.iter().chain(PRINTED_120A1.iter()).map(|&[w, b, r, v, s]| BrvsRow::new(w, b, r, v, s)).collect()
}

// ---------------------------------------------------------------------------
// size witnesses

pub const RATIONAL_BOUND: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessRow {
    pub n: u64,
    pub integer: Option<IntWitness>,
    pub rational: Option<RatWitness>,
}

/// Integer-size witness for `4/n`, falling back to a rational-size one.
pub fn search_integer_witness(n: u64) -> Result<WitnessRow> {
    if n < 2 {
        return domain(format!("witness search needs n >= 2, got {n}"));
    }
    let integer = integer_size_reachable(n, 4);
    let rational = if integer.is_none() { rational_size_reachable(n, 4, RATIONAL_BOUND) } else { None };
    Ok(WitnessRow { n, integer, rational })
}

// ---------------------------------------------------------------------------
// m = 1 (mod 840)

/// `F17a`: `4/m = 1/((m+c)/4) + 1/((m+c)(a+b)m/(4ac)) + 1/((m+c)(a+b)m/(4bc))`.
/// `F17b`: the same with `mc+1` in place of `m+c` and `m` moved to the first term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Abc {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub form: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mod840Row {
    pub m: u64,
    pub hit: Option<Abc>,
}

fn abc_form(m: u64, c: u64, b_max: u64, form: &'static str) -> Option<Abc> {
    // With X = (m+c)/4 the conditions read ac | X(a+b)m and bc | X(a+b)m;
    // the mc+1 form drops the factor m. Either way a | Xbm.
    let (x, mm) = match form {
        "F17a" if (m + c) % 4 == 0 => ((m + c) / 4, m),
        "F17b" if (m * c + 1) % 4 == 0 => ((m * c + 1) / 4, 1),
        _ => return None,
    };
    let a_lim = ((m + c) / 4).max((m * c + 1) / 4);
    let base = x as u128 * mm as u128;
    let ok = |a: u64, b: u64| {
        let top = base * (a + b) as u128;
        top % (a as u128 * c as u128) == 0 && top % (b as u128 * c as u128) == 0
    };
    (1..=b_max)
        .flat_map(|b| {
            let mut f = factor_u64(x);
            for part in [mm, b] {
                for (q, e) in factor_u64(part) {
                    match f.iter_mut().find(|(y, _)| *y == q) {
                        Some(slot) => slot.1 += e,
                        None => f.push((q, e)),
                    }
                }
            }
            crate::arith::divisors_from(&f).into_iter().filter(move |&a| a < a_lim).map(move |a| (a, b))
        })
        .filter(|&(a, b)| ok(a, b))
        .min()
        .map(|(a, b)| Abc { a, b, c, form })
}

/// For every `m = 1 (mod 840)` up to `m_max`, the smallest `(c, a, b)` with
/// `c <= c_max`, `b <= b_max`, `a < max((m+c)/4, (mc+1)/4)` satisfying either form.
pub fn search_abc_mod840(m_max: u64, c_max: u64, b_max: u64) -> Result<Vec<Mod840Row>> {
    let ms: Vec<u64> = (0..).map(|i| 840 * i + 1).take_while(|&m| m <= m_max).collect();
    let rows = par::map(ms, |m| {
        let hit = (1..=c_max).find_map(|c| {
            [abc_form(m, c, b_max, "F17a"), abc_form(m, c, b_max, "F17b")]
                .into_iter()
                .flatten()
                .min_by_key(|h| (h.a, h.b))
        });
        Mod840Row { m, hit }
    });
    for row in &rows {
        if let Some(h) = &row.hit {
            let p = binding(&[("m", row.m as i64), ("a", h.a as i64), ("b", h.b as i64), ("c", h.c as i64)]);
            let rec = families::evaluate(h.form, &p)?;
            if !rec.verified() {
                return Err(Error::IdentityViolation(format!("mod-840 row {row:?} does not verify")));
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// emission

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

pub fn brvs_csv(rows: &[BrvsRow]) -> String {
    let mut out = String::from("w,b,r,v,s\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.w, r.b, r.r, r.v, r.s));
    }
    out
}

/// One decomposition record per row, in the record JSON schema.
pub fn brvs_json(rows: &[BrvsRow]) -> Result<String> {
    let recs: Vec<RecordJson> = rows.iter().map(|r| r.record().map(|rec| rec.to_json())).collect::<Result<_>>()?;
    let mut s = serde_json::to_string_pretty(&recs).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn witness_csv(rows: &[WitnessRow]) -> String {
    let mut out = String::from("n,c,d,t,e,u,f,t_rational\n");
    let o = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        let (i, q) = (r.integer, r.rational);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            o(i.map(|w| w.c)),
            o(i.map(|w| w.d)),
            o(i.map(|w| w.t)),
            o(q.map(|w| w.e)),
            o(q.map(|w| w.u)),
            o(q.map(|w| w.f)),
            o(q.map(|w| w.t)),
        ));
    }
    out
}

/// Writes verified rows; an unverified row is refused.
pub fn emit_table(rows: &[BrvsRow], format: Format, path: &Path) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| !r.verified) {
        return Err(Error::IdentityViolation(format!("refusing to emit unverified row for w={}", bad.w)));
    }
    let body = match format {
        Format::Csv => brvs_csv(rows),
        Format::Json => brvs_json(rows)?,
    };
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
