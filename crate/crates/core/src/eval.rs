//! Cross-validated evaluation and significance testing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::FoldPlan;
use crate::error::{Error, Result};
use crate::metric_labeling::MetricConfig;
use crate::pipeline::{Dataset, ExperimentOptions, FoldContext, Method};
use crate::psp::PolarityModel;

fn check_lengths(preds: &[usize], truths: &[usize]) -> Result<()> {
    if preds.len() != truths.len() {
        return Err(Error::LengthMismatch(preds.len(), truths.len()));
    }
    if preds.is_empty() {
        return Err(Error::invalid("no predictions to score"));
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn accuracy(preds: &[usize], truths: &[usize]) -> Result<f64> {
    check_lengths(preds, truths)?;
    Ok(preds.iter().zip(truths).filter(|(p, t)| p == t).count() as f64 / preds.len() as f64)
}

/// Mean absolute label difference.
pub fn l1_error(preds: &[usize], truths: &[usize]) -> Result<f64> {
    check_lengths(preds, truths)?;
    Ok(preds.iter().zip(truths).map(|(p, t)| p.abs_diff(*t) as f64).sum::<f64>() / preds.len() as f64)
}

/// Most frequent label; ties go to the lowest.
pub fn majority_label(labels: &[usize], num_classes: usize) -> usize {
    let mut counts = vec![0usize; num_classes.max(labels.iter().max().map_or(0, |m| m + 1))];
    for &l in labels {
        counts[l] += 1;
    }
    let mut best = 0;
    for (l, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = l;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub label: usize,
}

impl MajorityBaseline {
    pub fn fit(labels: &[usize], num_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("majority baseline needs training labels"));
        }
        Ok(Self {
            label: majority_label(labels, num_classes),
        })
    }

    pub fn predict(&self, n: usize) -> Vec<usize> {
        vec![self.label; n]
    }
}

/// Output of one method on one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutput {
    pub predictions: Vec<usize>,
    pub config: Option<MetricConfig>,
}

/// Anything that can label the test side of a split.
pub trait FoldPredictor: Sync {
    fn name(&self) -> String;
    fn predict_fold(&self, ctx: &FoldContext) -> Result<FoldOutput>;
}

impl FoldPredictor for Method {
    fn name(&self) -> String {
        self.to_string()
    }

    fn predict_fold(&self, ctx: &FoldContext) -> Result<FoldOutput> {
        let run = ctx.run(*self)?;
        Ok(FoldOutput {
            predictions: run.predictions,
            config: run.config,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub fold: usize,
    pub truth: usize,
    pub predicted: usize,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    pub n_folds: usize,
    pub plan_fingerprint: String,
    /// Set when `(k, alpha)` were tuned on the test folds.
    pub oracle_tuning: bool,
    pub fold_accuracy: Vec<f64>,
    pub fold_l1: Vec<f64>,
    pub baseline_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    pub mean_l1: f64,
    pub configs: Vec<Option<MetricConfig>>,
    pub predictions: Vec<PredictionRecord>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

impl EvalReport {
    /// CSV: `id,fold,true,pred,k,alpha`.
    pub fn write_predictions_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,fold,true,pred,k,alpha")?;
        for p in &self.predictions {
            let k = p.k.map(|k| k.to_string()).unwrap_or_default();
            let a = p.alpha.map(|a| a.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{k},{a}", p.id, p.fold, p.truth, p.predicted)?;
        }
        Ok(())
    }

    /// CSV: one line per fold.
    pub fn write_folds_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dataset,method,fold,accuracy,l1,baseline_accuracy")?;
        for f in 0..self.n_folds {
            writeln!(
                w,
                "{},{},{f},{},{},{}",
                self.dataset, self.method, self.fold_accuracy[f], self.fold_l1[f], self.baseline_accuracy[f]
            )?;
        }
        Ok(())
    }
}

/// Builds one context per fold of `plan`.
pub fn fold_contexts(
    dataset: &Dataset,
    plan: &FoldPlan,
    options: &ExperimentOptions,
    polarity: Option<Arc<PolarityModel>>,
) -> Result<Vec<FoldContext>> {
    let options = Arc::new(options.clone());
    (0..plan.n_folds)
        .map(|f| {
            let (train, test) = dataset.split(plan, f)?;
            if test.is_empty() {
                return Err(Error::FoldPlanMismatch(format!("fold {f} is empty")));
            }
            Ok(FoldContext::new(train, test, options.clone()).with_polarity(polarity.clone()))
        })
        .collect()
}

/// Evaluates several predictors on shared folds, so their learners are
/// trained once per fold.
pub fn cross_validate_many(
    predictors: &[&dyn FoldPredictor],
    dataset: &Dataset,
    plan: &FoldPlan,
    options: &ExperimentOptions,
) -> Result<Vec<Result<EvalReport>>> {
    let contexts = fold_contexts(dataset, plan, options, None)?;
    Ok(evaluate_on_contexts(predictors, &dataset.name, plan, &contexts, options.oracle_tuning))
}

pub fn cross_validate(
    predictor: &dyn FoldPredictor,
    dataset: &Dataset,
    plan: &FoldPlan,
    options: &ExperimentOptions,
) -> Result<EvalReport> {
    cross_validate_many(&[predictor], dataset, plan, options)?.pop().expect("one report")
}

pub fn evaluate_on_contexts(
    predictors: &[&dyn FoldPredictor],
    dataset: &str,
    plan: &FoldPlan,
    contexts: &[FoldContext],
    oracle_tuning: bool,
) -> Vec<Result<EvalReport>> {
    // folds run in parallel; methods within a fold share its caches
    let per_fold: Vec<Vec<Result<FoldOutput>>> = contexts
        .par_iter()
        .map(|ctx| predictors.iter().map(|p| p.predict_fold(ctx)).collect())
        .collect();
    predictors
        .iter()
        .enumerate()
        .map(|(pi, predictor)| {
            let mut report = EvalReport {
                method: predictor.name(),
                dataset: dataset.to_string(),
                n_folds: plan.n_folds,
                plan_fingerprint: plan.fingerprint(),
                oracle_tuning,
                fold_accuracy: Vec::new(),
                fold_l1: Vec::new(),
                baseline_accuracy: Vec::new(),
                mean_accuracy: 0.0,
                mean_l1: 0.0,
                configs: Vec::new(),
                predictions: Vec::new(),
            };
            for (f, ctx) in contexts.iter().enumerate() {
                let out = per_fold[f][pi].clone()?;
                let truths = &ctx.test().labels;
                if out.predictions.len() != truths.len() {
                    return Err(Error::LengthMismatch(out.predictions.len(), truths.len()));
                }
                let base = MajorityBaseline::fit(&ctx.train().labels, ctx.train().scale.num_classes())?;
                report.fold_accuracy.push(accuracy(&out.predictions, truths)?);
                report.fold_l1.push(l1_error(&out.predictions, truths)?);
                report.baseline_accuracy.push(accuracy(&base.predict(truths.len()), truths)?);
                report.configs.push(out.config);
                for ((id, &t), &p) in ctx.test().ids().iter().zip(truths).zip(&out.predictions) {
                    report.predictions.push(PredictionRecord {
                        id: id.clone(),
                        fold: f,
                        truth: t,
                        predicted: p,
                        k: out.config.map(|c| c.k),
                        alpha: out.config.map(|c| c.alpha),
                    });
                }
            }
            report.mean_accuracy = mean(&report.fold_accuracy);
            report.mean_l1 = mean(&report.fold_l1);
            Ok(report)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub df: usize,
}

/// Variance below this counts as zero.
pub const VARIANCE_GUARD: f64 = 1e-12;

/// Two-sided paired t-test of `a - b`.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("a paired t-test needs at least 2 pairs"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let df = n - 1;
    let m = mean(&d);
    let var = d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / df as f64;
    if d.iter().all(|&v| v == 0.0) {
        return Ok(TTest { t: 0.0, p: 1.0, df });
    }
    if var < VARIANCE_GUARD {
        return Ok(TTest {
            t: m.signum() * f64::INFINITY,
            p: 0.0,
            df,
        });
    }
    let t = m / (var / n as f64).sqrt();
    Ok(TTest {
        t,
        p: student_t_two_sided(t, df as f64),
        df,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0)
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, n = 9
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front.exp() * beta_cf(x, a, b) / a).clamp(0.0, 1.0)
    } else {
        (1.0 - ln_front.exp() * beta_cf(1.0 - x, b, a) / b).clamp(0.0, 1.0)
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RowBetter,
    ColumnBetter,
    Indistinguishable,
}

impl Verdict {
    pub fn mirrored(self) -> Self {
        match self {
            Self::RowBetter => Self::ColumnBetter,
            Self::ColumnBetter => Self::RowBetter,
            Self::Indistinguishable => Self::Indistinguishable,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Self::RowBetter => '<',
            Self::ColumnBetter => '^',
            Self::Indistinguishable => '.',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceCell {
    pub dataset: String,
    pub row: String,
    pub column: String,
    pub verdict: Verdict,
    pub t: f64,
    pub p: f64,
}

/// Pairwise verdicts per dataset, in the order the methods first appear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceTable {
    pub alpha: f64,
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    pub cells: Vec<SignificanceCell>,
}

/// Verdict of `row` against `column` at level `alpha`.
pub fn verdict(row: &EvalReport, column: &EvalReport, alpha: f64) -> Result<(Verdict, TTest)> {
    if row.plan_fingerprint != column.plan_fingerprint {
        return Err(Error::FoldPlanMismatch(format!(
            "{} and {} on {} used different fold plans",
            row.method, column.method, row.dataset
        )));
    }
    let test = paired_ttest(&row.fold_accuracy, &column.fold_accuracy)?;
    let v = if test.p < alpha {
        if row.mean_accuracy > column.mean_accuracy {
            Verdict::RowBetter
        } else if row.mean_accuracy < column.mean_accuracy {
            Verdict::ColumnBetter
        } else {
            Verdict::Indistinguishable
        }
    } else {
        Verdict::Indistinguishable
    };
    Ok((v, test))
}

pub fn significance_table(reports: &[EvalReport], alpha: f64) -> Result<SignificanceTable> {
    let mut methods: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    let mut by_key: BTreeMap<(&str, &str), &EvalReport> = BTreeMap::new();
    for r in reports {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
        if !datasets.contains(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
        by_key.insert((r.dataset.as_str(), r.method.as_str()), r);
    }
    let mut cells = Vec::new();
    for d in &datasets {
        for (i, a) in methods.iter().enumerate() {
            for b in &methods[i + 1..] {
                let (Some(ra), Some(rb)) = (by_key.get(&(d.as_str(), a.as_str())), by_key.get(&(d.as_str(), b.as_str())))
                else {
                    continue;
                };
                let (v, t) = verdict(ra, rb, alpha)?;
                cells.push(SignificanceCell {
                    dataset: d.clone(),
                    row: a.clone(),
                    column: b.clone(),
                    verdict: v,
                    t: t.t,
                    p: t.p,
                });
            }
        }
    }
    Ok(SignificanceTable {
        alpha,
        methods,
        datasets,
        cells,
    })
}

impl SignificanceTable {
    /// Verdict of `row` against `column` on `dataset`, in either order.
    pub fn lookup(&self, dataset: &str, row: &str, column: &str) -> Option<Verdict> {
        if row == column {
            return Some(Verdict::Indistinguishable);
        }
        self.cells.iter().find_map(|c| {
            if c.dataset != dataset {
                None
            } else if c.row == row && c.column == column {
                Some(c.verdict)
            } else if c.row == column && c.column == row {
                Some(c.verdict.mirrored())
            } else {
                None
            }
        })
    }

    /// Upper-triangle text matrix. Each cell holds one symbol per dataset:
    /// `<` row better, `^` column better, `.` no significant difference.
    pub fn render(&self) -> String {
        let width = self.methods.iter().map(String::len).max().unwrap_or(0).max(self.datasets.len());
        let mut out = String::new();
        let _ = writeln!(out, "datasets: {}", self.datasets.join(", "));
        let _ = writeln!(out, "< row better, ^ column better, . indistinguishable (p < {})", self.alpha);
        let _ = write!(out, "{:width$}", "");
        for m in &self.methods[1.min(self.methods.len())..] {
            let _ = write!(out, " {m:>width$}");
        }
        out.push('\n');
        for (i, row) in self.methods.iter().enumerate().take(self.methods.len().saturating_sub(1)) {
            let _ = write!(out, "{row:width$}");
            for (j, col) in self.methods.iter().enumerate().skip(1) {
                let cell: String = if j <= i {
                    String::new()
                } else {
                    self.datasets
                        .iter()
                        .map(|d| self.lookup(d, row, col).map_or(' ', Verdict::symbol))
                        .collect()
                };
                let _ = write!(out, " {cell:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn metric_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(l1_error(&[0, 1, 2], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(accuracy(&[1, 2, 1], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(l1_error(&[1, 2, 1], &[0, 1, 2]).unwrap(), 1.0);
        assert!((accuracy(&[0, 2, 1], &[0, 0, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((l1_error(&[0, 2, 1], &[0, 0, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn majority_examples() {
        let mut labels = vec![0; 5];
        labels.extend([1; 3]);
        assert_eq!(MajorityBaseline::fit(&labels, 2).unwrap().label, 0);
        assert_eq!(MajorityBaseline::fit(&[0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap().label, 0);
        let b = MajorityBaseline::fit(&[2, 2, 1], 3).unwrap();
        assert!((accuracy(&b.predict(3), &[0, 1, 2]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ttest_degenerate_cases() {
        let a = [0.5, 0.6, 0.7];
        assert_eq!(paired_ttest(&a, &a).unwrap(), TTest { t: 0.0, p: 1.0, df: 2 });
        let t = paired_ttest(&[2.0; 4], &[1.0; 4]).unwrap();
        assert_eq!((t.p, t.t), (0.0, f64::INFINITY));
        assert!(paired_ttest(&[1.0], &[1.0]).is_err());
        assert!(paired_ttest(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn ttest_reference_values() {
        // differences (0.02, 0.01, 0.03, 0.00, 0.02, 0.01, 0.02, 0.03, 0.01, 0.02):
        // mean 0.017, sample sd 0.0094868..., t = 0.017 / (sd / sqrt 10)
        let d = [0.02, 0.01, 0.03, 0.00, 0.02, 0.01, 0.02, 0.03, 0.01, 0.02];
        let zeros = [0.0; 10];
        let r = paired_ttest(&d, &zeros).unwrap();
        let sd = (d.iter().map(|v| (v - 0.017) * (v - 0.017)).sum::<f64>() / 9.0).sqrt();
        assert!((r.t - 0.017 / (sd / 10f64.sqrt())).abs() < 1e-9);
        // scipy.stats.ttest_rel reference
        assert!((r.t - 5.666666666666667).abs() < 1e-9);
        assert!((r.p - 3.07021996300963e-4).abs() < 1e-9);
    }

    #[test]
    fn t_distribution_known_points() {
        // df = 1 is Cauchy: P(|T| >= 1) = 1/2
        assert!((student_t_two_sided(1.0, 1.0) - 0.5).abs() < 1e-12);
        // df = 2: P(|T| >= t) = 1 - t / sqrt(2 + t^2)
        for t in [0.3, 1.0, 2.5, 7.0] {
            assert!((student_t_two_sided(t, 2.0) - (1.0 - t / (2.0 + t * t).sqrt())).abs() < 1e-12);
        }
        assert_eq!(student_t_two_sided(0.0, 5.0), 1.0);
    }

    fn report(method: &str, acc: &[f64]) -> EvalReport {
        EvalReport {
            method: method.into(),
            dataset: "d".into(),
            n_folds: acc.len(),
            plan_fingerprint: "p".into(),
            oracle_tuning: false,
            fold_accuracy: acc.to_vec(),
            fold_l1: vec![0.0; acc.len()],
            baseline_accuracy: vec![0.0; acc.len()],
            mean_accuracy: mean(acc),
            mean_l1: 0.0,
            configs: vec![None; acc.len()],
            predictions: Vec::new(),
        }
    }

    #[test]
    fn significance_examples() {
        let a = report("a", &[0.7, 0.72, 0.69, 0.71, 0.70]);
        let b = report("b", &[0.6, 0.62, 0.59, 0.61, 0.60]);
        let same = report("c", &[0.7, 0.72, 0.69, 0.71, 0.70]);
        let t = significance_table(&[a.clone(), b.clone(), same], 0.05).unwrap();
        assert_eq!(t.lookup("d", "a", "b"), Some(Verdict::RowBetter));
        assert_eq!(t.lookup("d", "b", "a"), Some(Verdict::ColumnBetter));
        assert_eq!(t.lookup("d", "a", "c"), Some(Verdict::Indistinguishable));
        assert_eq!(t.lookup("d", "a", "a"), Some(Verdict::Indistinguishable));
        let rendered = t.render();
        assert!(rendered.contains('<') && rendered.contains('.'));
        let mut other = b;
        other.plan_fingerprint = "q".into();
        assert!(matches!(significance_table(&[a, other], 0.05), Err(Error::FoldPlanMismatch(_))));
    }

    proptest! {
        #[test]
        fn ttest_antisymmetric(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..12)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let (x, y) = (paired_ttest(&a, &b).unwrap(), paired_ttest(&b, &a).unwrap());
            prop_assert!(x.t == -y.t || (x.t == 0.0 && y.t == 0.0));
            prop_assert_eq!(x.p, y.p);
            prop_assert!((0.0..=1.0).contains(&x.p));
        }

        #[test]
        fn accuracy_and_l1_consistent(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..30)) {
            let (p, t): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let acc = accuracy(&p, &t).unwrap();
            let wrong = p.iter().zip(&t).filter(|(a, b)| a != b).count() as f64 / p.len() as f64;
            prop_assert!((acc + wrong - 1.0).abs() < 1e-12);
            prop_assert_eq!(l1_error(&p, &t).unwrap() == 0.0, acc == 1.0);
        }
    }
}
