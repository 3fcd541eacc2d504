//! Single verification cases. A case is fully described by a [`CaseSpec`], so it can be
//! recomputed from a witness without the workspace or seed that produced it.

use std::sync::Arc;

use extlab_core::homology::{
    determined_through, ext_dims_from, find_gaps_in, p_sup_from_table, partial_resolution, tor_dims_from, DimKind, DimTable,
    FreeResolution, PSup,
};
use extlab_core::module::{injective_envelope_of_residue, is_free, residue_module};
use extlab_core::polyext::verify_specialization_identity;
use extlab_core::{Error, FiniteAlgebra, FiniteModule, TruncatedSeries};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{HarnessError, Result};
use crate::report::Verdict;
use crate::serial::{AlgebraSpec, ModuleSpec, PolyModuleSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseParams {
    pub bound: usize,
    pub window: usize,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CaseSpec {
    /// `Tor_n^A(M, N) != 0` for `3 <= n <= B`, `A` a trivial extension `R(k)`.
    TrivialExtTor { algebra: AlgebraSpec, m: ModuleSpec, n: ModuleSpec },
    /// The Tor splitting for `R`-modules regarded over `R(k)`.
    TorSplitting { base: AlgebraSpec, m: ModuleSpec, n: ModuleSpec },
    /// `P_{R(k)} = P_R / (1 - t P_R)` for the residue field.
    GulliksenResidue { base: AlgebraSpec },
    /// `P^{R(k)}_{M,N} = P^R_{M,N} + t P^{R(k)}_M P^R_N` in lengths.
    GulliksenPair { base: AlgebraSpec, m: ModuleSpec, n: ModuleSpec },
    /// `Ext^i_A(M, N) != 0` for `3 <= i <= B`.
    ExtRigidity { algebra: AlgebraSpec, m: ModuleSpec, n: ModuleSpec },
    /// `Ext^i_A(E, A) != 0` for `3 <= i <= B`, `E` the injective envelope of `k`.
    EnvNonvanishing { algebra: AlgebraSpec },
    /// A zero of `Ext^i_A(M, M ⊕ A)` with `3 <= i <= B` forces `M` free.
    AuslanderReiten { algebra: AlgebraSpec, m: ModuleSpec },
    /// Ext over `A1 × A2` is the sum of Ext over the factors.
    ProductExt {
        left: AlgebraSpec,
        right: AlgebraSpec,
        m_left: ModuleSpec,
        n_left: ModuleSpec,
        m_right: ModuleSpec,
        n_right: ModuleSpec,
    },
    /// Ext dimensions are unchanged by extending scalars to `F_{p^{e r}}` for each `r`.
    BaseChangeExt { algebra: AlgebraSpec, m: ModuleSpec, n: ModuleSpec, factors: Vec<u32> },
    /// The specialization identity at each listed `alpha` (integer encodings).
    Specialization { algebra: AlgebraSpec, m: PolyModuleSpec, n: PolyModuleSpec, alphas: Vec<u32> },
    /// Records the Ext table, its gaps and the windowed `p_sup`.
    GapScan { algebra: AlgebraSpec, m: ModuleSpec, n: ModuleSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub detail: Value,
}

impl Outcome {
    fn new(verdict: Verdict, reason: Option<String>, detail: Value) -> Self {
        Outcome { verdict, reason, detail }
    }
}

/// Runs a case, turning errors into verdicts: exhausted budgets are INCONCLUSIVE, a failed
/// `x - alpha` precondition is SKIP, anything else (including a resolution that fails its
/// structural check) is FAIL.
pub fn evaluate(case: &CaseSpec, params: &CaseParams) -> Outcome {
    match run_case(case, params) {
        Ok(o) => o,
        Err(e) => error_outcome(e),
    }
}

pub(crate) fn error_outcome(e: HarnessError) -> Outcome {
    let verdict = match &e {
        HarnessError::Core(Error::BudgetExceeded(_)) => Verdict::Inconclusive,
        HarnessError::Core(Error::NzdPreconditionFailed(_)) | HarnessError::SamplingExhausted { .. } => Verdict::Skip,
        _ => Verdict::Fail,
    };
    Outcome::new(verdict, Some(e.to_string()), Value::Null)
}

/// Tor or Ext dimensions through the largest degree the budget allows.
struct Partial {
    dims: Vec<usize>,
    bound: usize,
}

impl Partial {
    fn complete(&self) -> bool {
        self.dims.len() == self.bound + 1
    }

    /// Highest determined degree, `-1` when nothing is.
    fn through(&self) -> i64 {
        self.dims.len() as i64 - 1
    }

    fn json(&self) -> Value {
        json!({ "dims": self.dims, "determined_through": self.through() })
    }
}

fn dims_through(res: &FreeResolution, n: &FiniteModule, bound: usize, kind: DimKind) -> Result<Partial> {
    let dims = match determined_through(res, bound) {
        Some(t) => match kind {
            DimKind::Ext => ext_dims_from(res, n, t)?.dims,
            DimKind::Tor => tor_dims_from(res, n, t)?.dims,
        },
        None => Vec::new(),
    };
    Ok(Partial { dims, bound })
}

fn partial(m: &FiniteModule, n: &FiniteModule, p: &CaseParams, kind: DimKind) -> Result<Partial> {
    dims_through(&partial_resolution(m, p.bound + 1, p.budget)?, n, p.bound, kind)
}

/// Betti numbers `b_0..=b_t` with `t <= through` as far as the resolution knows them.
fn betti(res: &FreeResolution, through: usize) -> Vec<usize> {
    let b = res.betti_numbers();
    let known = if res.terminated() { through } else { res.length().min(through) };
    (0..=known).map(|i| b.get(i).copied().unwrap_or(0)).collect()
}

fn nonvanishing(p: &Partial, from: usize, what: &str) -> Outcome {
    if let Some(i) = (from..p.dims.len()).find(|&i| p.dims[i] == 0) {
        return Outcome::new(Verdict::Fail, Some(format!("{what}_{i} vanishes")), p.json());
    }
    if p.complete() {
        Outcome::new(Verdict::Pass, None, p.json())
    } else {
        let reason = format!("budget exceeded; {what} determined through degree {}", p.through());
        Outcome::new(Verdict::Inconclusive, Some(reason), p.json())
    }
}

fn series(v: &[usize]) -> TruncatedSeries {
    TruncatedSeries::new(v.iter().map(|&x| BigInt::from(x)).collect())
}

/// The data entering the Tor splitting for `R`-modules `M`, `N` viewed over `A = R(k)`.
struct Splitting {
    f: usize,
    tor_a: Vec<usize>,
    tor_r: Vec<usize>,
    betti_a_m: Vec<usize>,
    betti_r_n: Vec<usize>,
    /// Degrees `0..=top` are known on both sides.
    top: usize,
}

fn splitting(base: &AlgebraSpec, m: &ModuleSpec, n: &ModuleSpec, p: &CaseParams) -> Result<Splitting> {
    let r = base.build()?;
    let a = Arc::new(r.residue_trivial_extension()?);
    let (m, n) = (m.build(&r)?, n.build(&r)?);
    let (ma, na) = (m.restrict_to_trivial_extension(&a)?, n.restrict_to_trivial_extension(&a)?);
    let res_ma = partial_resolution(&ma, p.bound + 1, p.budget)?;
    let tor_a = dims_through(&res_ma, &na, p.bound, DimKind::Tor)?.dims;
    let tor_r = partial(&m, &n, p, DimKind::Tor)?.dims;
    let betti_a_m = betti(&res_ma, p.bound);
    let betti_r_n = betti(&partial_resolution(&n, p.bound, p.budget)?, p.bound);
    let top = [tor_a.len(), tor_r.len(), betti_a_m.len() + 1, betti_r_n.len() + 1].into_iter().min().unwrap_or(0);
    if top == 0 {
        return Err(Error::BudgetExceeded("nothing determined within the budget".into()).into());
    }
    Ok(Splitting { f: r.residue_degree()?, tor_a, tor_r, betti_a_m, betti_r_n, top: top - 1 })
}

fn mismatch_outcome(mismatch: Option<usize>, complete: bool, top: usize, detail: Value) -> Outcome {
    match mismatch {
        Some(i) => Outcome::new(Verdict::Fail, Some(format!("identity fails in degree {i}")), detail),
        None if complete => Outcome::new(Verdict::Pass, None, detail),
        None => Outcome::new(Verdict::Inconclusive, Some(format!("budget exceeded; checked through degree {top}")), detail),
    }
}

fn build_pair(algebra: &AlgebraSpec, m: &ModuleSpec, n: &ModuleSpec) -> Result<(Arc<FiniteAlgebra>, FiniteModule, FiniteModule)> {
    let a = algebra.build()?;
    let (m, n) = (m.build(&a)?, n.build(&a)?);
    Ok((a, m, n))
}

pub fn run_case(case: &CaseSpec, p: &CaseParams) -> Result<Outcome> {
    match case {
        CaseSpec::TrivialExtTor { algebra, m, n } => {
            let (_, m, n) = build_pair(algebra, m, n)?;
            Ok(nonvanishing(&partial(&m, &n, p, DimKind::Tor)?, 3, "Tor"))
        }
        CaseSpec::ExtRigidity { algebra, m, n } => {
            let (_, m, n) = build_pair(algebra, m, n)?;
            Ok(nonvanishing(&partial(&m, &n, p, DimKind::Ext)?, 3, "Ext"))
        }
        CaseSpec::EnvNonvanishing { algebra } => {
            let a = algebra.build()?;
            let e = injective_envelope_of_residue(&a)?;
            Ok(nonvanishing(&partial(&e, &FiniteModule::regular(&a), p, DimKind::Ext)?, 3, "Ext"))
        }
        CaseSpec::TorSplitting { base, m, n } => {
            let s = splitting(base, m, n, p)?;
            let mut expected = vec![s.tor_a[0]];
            for k in 1..=s.top {
                let cross: usize = (0..k).map(|i| s.betti_a_m[i] * s.betti_r_n[k - 1 - i]).sum();
                expected.push(s.tor_r[k] + s.f * cross);
            }
            let observed = &s.tor_a[..=s.top];
            let mismatch = (1..=s.top).find(|&k| observed[k] != expected[k]);
            let detail = json!({
                "tor_over_extension": observed,
                "tor_over_base": &s.tor_r[..=s.top],
                "predicted": expected,
                "residue_degree": s.f,
            });
            Ok(mismatch_outcome(mismatch, s.top == p.bound, s.top, detail))
        }
        CaseSpec::GulliksenPair { base, m, n } => {
            let s = splitting(base, m, n, p)?;
            let t = s.top;
            let lengths = |v: &[usize]| v[..=t].iter().map(|x| x / s.f).collect::<Vec<_>>();
            // only b_0..b_{t-1} enter the t^t coefficient, so an unknown b_t may be padded
            let padded = |v: &[usize]| {
                let mut w: Vec<usize> = v.iter().take(t + 1).copied().collect();
                w.resize(t + 1, 0);
                series(&w)
            };
            let lhs = series(&lengths(&s.tor_a));
            let cross = TruncatedSeries::t(t).mul(&padded(&s.betti_a_m)).mul(&padded(&s.betti_r_n));
            let rhs = series(&lengths(&s.tor_r)).add(&cross);
            let mismatch = (0..=t).find(|&i| lhs.coeff(i) != rhs.coeff(i));
            let detail = json!({ "lhs": lhs.to_string(), "rhs": rhs.to_string() });
            Ok(mismatch_outcome(mismatch, t == p.bound, t, detail))
        }
        CaseSpec::GulliksenResidue { base } => {
            let r = base.build()?;
            let a = Arc::new(r.residue_trivial_extension()?);
            let b_r = betti(&partial_resolution(&residue_module(&r)?, p.bound, p.budget)?, p.bound);
            let b_a = betti(&partial_resolution(&residue_module(&a)?, p.bound, p.budget)?, p.bound);
            let t = b_r.len().min(b_a.len()) - 1;
            let p_r = series(&b_r[..=t]);
            let predicted = p_r.mul_inv(&TruncatedSeries::one(t).sub(&TruncatedSeries::t(t).mul(&p_r)))?;
            let mismatch = (0..=t).find(|&i| predicted.coeff(i) != BigInt::from(b_a[i]));
            let detail = json!({
                "betti_base": &b_r[..=t],
                "betti_extension": &b_a[..=t],
                "predicted": predicted.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            Ok(mismatch_outcome(mismatch, t == p.bound, t, detail))
        }
        CaseSpec::AuslanderReiten { algebra, m } => {
            let a = algebra.build()?;
            let m = m.build(&a)?;
            let target = m.direct_sum(&FiniteModule::regular(&a))?;
            let ext = partial(&m, &target, p, DimKind::Ext)?;
            let free = is_free(&m)?;
            let zero = (3..ext.dims.len()).find(|&i| ext.dims[i] == 0);
            let mut detail = ext.json();
            detail["free"] = json!(free);
            detail["vacuous"] = json!(zero.is_none());
            Ok(match zero {
                Some(i) if !free => Outcome::new(Verdict::Fail, Some(format!("Ext^{i}(M, M ⊕ A) = 0 for non-free M")), detail),
                Some(_) => Outcome::new(Verdict::Pass, None, detail),
                None if ext.complete() => Outcome::new(Verdict::Pass, None, detail),
                None => Outcome::new(Verdict::Inconclusive, Some(format!("budget exceeded; Ext determined through degree {}", ext.through())), detail),
            })
        }
        CaseSpec::ProductExt { left, right, m_left, n_left, m_right, n_right } => {
            let (a1, ml, nl) = build_pair(left, m_left, n_left)?;
            let (a2, mr, nr) = build_pair(right, m_right, n_right)?;
            let prod = Arc::new(FiniteAlgebra::product(&a1, &a2)?);
            let m = FiniteModule::product_module(&prod, &ml, &mr)?;
            let n = FiniteModule::product_module(&prod, &nl, &nr)?;
            let factors = prod.local_decompose();
            if factors.len() != 2 {
                return Ok(Outcome::new(Verdict::Fail, Some(format!("{} local factors", factors.len())), Value::Null));
            }
            let mut parts = vec![partial(&ml, &nl, p, DimKind::Ext)?, partial(&mr, &nr, p, DimKind::Ext)?];
            for fa in &factors {
                parts.push(partial(&m.restrict_to_factor(fa), &n.restrict_to_factor(fa), p, DimKind::Ext)?);
            }
            let t = parts.iter().map(|x| x.dims.len()).min().unwrap_or(0);
            if t == 0 {
                return Err(Error::BudgetExceeded("nothing determined within the budget".into()).into());
            }
            let sum = |a: &Partial, b: &Partial| (0..t).map(|i| a.dims[i] + b.dims[i]).collect::<Vec<_>>();
            let (expected, observed) = (sum(&parts[0], &parts[1]), sum(&parts[2], &parts[3]));
            let mismatch = (0..t).find(|&i| expected[i] != observed[i]);
            let detail = json!({ "factors": expected, "decomposed_product": observed });
            Ok(mismatch_outcome(mismatch, t == p.bound + 1, t - 1, detail))
        }
        CaseSpec::BaseChangeExt { algebra, m, n, factors } => {
            let (a, m, n) = build_pair(algebra, m, n)?;
            let base = partial(&m, &n, p, DimKind::Ext)?;
            let e = a.field().degree();
            let mut detail = json!({ "original": base.dims });
            let mut t = base.dims.len();
            let mut mismatch = None;
            for &r in factors {
                let big = Arc::new(a.base_change(e * r)?);
                let ext = partial(&m.base_change(&big)?, &n.base_change(&big)?, p, DimKind::Ext)?;
                // dimensions over the original field
                let scaled: Vec<usize> = ext.dims.iter().map(|&x| x * r as usize).collect();
                t = t.min(scaled.len());
                if mismatch.is_none() {
                    mismatch = (0..t).find(|&i| scaled[i] != r as usize * base.dims[i]).map(|i| (r, i));
                }
                detail[format!("degree_{}", e * r)] = json!(scaled);
            }
            if t == 0 {
                return Err(Error::BudgetExceeded("nothing determined within the budget".into()).into());
            }
            Ok(match mismatch {
                Some((r, i)) => Outcome::new(Verdict::Fail, Some(format!("degree {} extension disagrees in Ext^{i}", e * r)), detail),
                None => mismatch_outcome(None, t == p.bound + 1, t - 1, detail),
            })
        }
        CaseSpec::Specialization { algebra, m, n, alphas } => {
            let a = algebra.build()?;
            let (m, n) = (m.build(&a)?, n.build(&a)?);
            let mut checked = Vec::new();
            let mut skipped = Vec::new();
            let mut failure = None;
            for &alpha in alphas {
                let al = a.field().element(alpha).ok_or_else(|| HarnessError::Validation(format!("{alpha} is not a field element")))?;
                match verify_specialization_identity(&m, &n, al, p.bound) {
                    Ok(rows) => {
                        if failure.is_none() {
                            failure = rows.iter().find(|r| !r.holds()).map(|r| (alpha, r.degree));
                        }
                        let rows: Vec<Value> =
                            rows.iter().map(|r| json!([r.degree, r.specialized, r.fiber, r.tor1])).collect();
                        checked.push(json!({ "alpha": alpha, "rows": rows }));
                    }
                    Err(Error::NzdPreconditionFailed(which)) => {
                        skipped.push(json!({ "alpha": alpha, "reason": format!("x - {alpha} is a zero divisor on {which}") }))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let detail = json!({ "checked": checked, "skipped": skipped, "row_format": ["degree", "specialized", "fiber", "tor1"] });
            Ok(if let Some((alpha, i)) = failure {
                Outcome::new(Verdict::Fail, Some(format!("identity fails at alpha = {alpha} in degree {i}")), detail)
            } else if checked.is_empty() {
                let reason = skipped.first().and_then(|s| s["reason"].as_str()).unwrap_or("no alpha to check").to_string();
                Outcome::new(Verdict::Skip, Some(reason), detail)
            } else {
                Outcome::new(Verdict::Pass, None, detail)
            })
        }
        CaseSpec::GapScan { algebra, m, n } => {
            let (_, m, n) = build_pair(algebra, m, n)?;
            let ext = partial(&m, &n, p, DimKind::Ext)?;
            let mut detail = ext.json();
            if !ext.dims.is_empty() {
                let table = DimTable { kind: DimKind::Ext, dims: ext.dims.clone() };
                let gaps: Vec<Value> = find_gaps_in(&table).into_iter().map(|(i, t)| json!({ "after": i, "length": t })).collect();
                detail["gaps"] = json!(gaps);
                detail["window"] = json!(p.window);
                if p.window >= 1 && table.bound() > p.window {
                    detail["p_sup_window"] = match p_sup_from_table(&table, p.window) {
                        PSup::Determined(i) => json!(i),
                        PSup::AllZero => json!("all-zero"),
                        PSup::Undetermined => json!("undetermined"),
                    };
                    detail["p_sup_basis"] = json!("vanishing on the last `window` degrees; evidence, not proof");
                }
            }
            Ok(Outcome::new(Verdict::Pass, None, detail))
        }
    }
}
