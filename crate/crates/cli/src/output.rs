//! CSV and JSON renderings. Floats use the shortest representation that
//! parses back to the same value.

use semiroots::pipeline::{Comparison, DomainReport, Solution};
use semiroots::{MellinForm, Root};
use serde::Serialize;

use crate::Format;

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn index(i: Option<usize>) -> String {
    i.map_or(String::new(), |i| i.to_string())
}

#[derive(Serialize)]
struct TermOut {
    exponent: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct Normalization {
    lambda_re: f64,
    lambda_im: f64,
    terms: Vec<TermOut>,
}

impl Normalization {
    fn of(form: &MellinForm) -> Self {
        Self {
            lambda_re: form.lambda.re,
            lambda_im: form.lambda.im,
            terms: form
                .terms
                .iter()
                .map(|t| TermOut {
                    exponent: t.exponent,
                    re: t.coeff.re,
                    im: t.coeff.im,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct RootOut {
    branch_index: Option<usize>,
    re: f64,
    im: f64,
    residual: f64,
    method: &'static str,
    in_sigma: bool,
    polished: bool,
    converged: bool,
}

impl From<&Root> for RootOut {
    fn from(r: &Root) -> Self {
        Self {
            branch_index: r.branch_index,
            re: r.value.re,
            im: r.value.im,
            residual: r.residual,
            method: r.method.as_str(),
            in_sigma: r.in_sigma,
            polished: r.polished,
            converged: r.converged,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_max_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_mean_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    raw_max_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    raw_mean_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outliers: Option<usize>,
}

#[derive(Serialize)]
struct Document<R: Serialize> {
    equation: String,
    normalization: Normalization,
    roots: Vec<R>,
    summary: Summary,
}

fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

pub fn solution(equation: &str, s: &Solution, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out =
                String::from("branch_index,re,im,residual,method,in_sigma,polished,converged\n");
            for r in &s.roots.roots {
                out += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    index(r.branch_index),
                    num(r.value.re),
                    num(r.value.im),
                    num(r.residual),
                    r.method.as_str(),
                    r.in_sigma,
                    r.polished,
                    r.converged
                );
            }
            out
        }
        Format::Json => json(&Document {
            equation: equation.to_string(),
            normalization: Normalization::of(&s.form),
            roots: s.roots.roots.iter().map(RootOut::from).collect(),
            summary: Summary {
                max_residual: s.roots.max_residual(),
                oracle_max_distance: None,
                oracle_mean_distance: None,
                raw_max_distance: None,
                raw_mean_distance: None,
                outliers: None,
            },
        }),
    }
}

#[derive(Serialize)]
struct DomainOut {
    branch_index: usize,
    min_abs_minus: f64,
    min_abs_plus: f64,
    t_at_min: f64,
    in_sigma: bool,
}

#[derive(Serialize)]
struct DomainDocument {
    equation: String,
    normalization: Normalization,
    branches: Vec<DomainOut>,
    all_convergent: bool,
}

pub fn domain(equation: &str, d: &DomainReport, format: Format) -> String {
    let rows: Vec<DomainOut> = d
        .branches
        .iter()
        .map(|(j, r)| DomainOut {
            branch_index: *j,
            min_abs_minus: r.min_abs_minus,
            min_abs_plus: r.min_abs_plus,
            t_at_min: r.t_at_min,
            in_sigma: r.in_sigma,
        })
        .collect();
    match format {
        Format::Csv => {
            let mut out =
                String::from("branch_index,min_abs_minus,min_abs_plus,t_at_min,in_sigma\n");
            for r in &rows {
                out += &format!(
                    "{},{},{},{},{}\n",
                    r.branch_index,
                    num(r.min_abs_minus),
                    num(r.min_abs_plus),
                    num(r.t_at_min),
                    r.in_sigma
                );
            }
            out
        }
        Format::Json => json(&DomainDocument {
            equation: equation.to_string(),
            normalization: Normalization::of(&d.form),
            branches: rows,
            all_convergent: d.all_convergent(),
        }),
    }
}

#[derive(Serialize)]
struct ComparisonOut {
    branch_index: Option<usize>,
    raw_re: f64,
    raw_im: f64,
    polished_re: f64,
    polished_im: f64,
    oracle_re: f64,
    oracle_im: f64,
    raw_distance: f64,
    polished_distance: f64,
    raw_residual: f64,
    polished_residual: f64,
    in_sigma: bool,
    outlier: bool,
}

pub fn comparison(equation: &str, form: &MellinForm, cmp: &Comparison, format: Format) -> String {
    let rows: Vec<ComparisonOut> = cmp
        .rows
        .iter()
        .map(|r| ComparisonOut {
            branch_index: r.branch_index,
            raw_re: r.raw.re,
            raw_im: r.raw.im,
            polished_re: r.polished.re,
            polished_im: r.polished.im,
            oracle_re: r.oracle.re,
            oracle_im: r.oracle.im,
            raw_distance: r.raw_distance,
            polished_distance: r.polished_distance,
            raw_residual: r.raw_residual,
            polished_residual: r.polished_residual,
            in_sigma: r.in_sigma,
            outlier: r.outlier,
        })
        .collect();
    match format {
        Format::Csv => {
            let mut out = String::from(
                "branch_index,raw_re,raw_im,polished_re,polished_im,oracle_re,oracle_im,\
                 raw_distance,polished_distance,raw_residual,polished_residual,in_sigma,outlier\n",
            );
            for r in &rows {
                out += &format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    index(r.branch_index),
                    num(r.raw_re),
                    num(r.raw_im),
                    num(r.polished_re),
                    num(r.polished_im),
                    num(r.oracle_re),
                    num(r.oracle_im),
                    num(r.raw_distance),
                    num(r.polished_distance),
                    num(r.raw_residual),
                    num(r.polished_residual),
                    r.in_sigma,
                    r.outlier
                );
            }
            out
        }
        Format::Json => json(&Document {
            equation: equation.to_string(),
            normalization: Normalization::of(form),
            roots: rows,
            summary: Summary {
                max_residual: cmp.summary.polished_max_residual,
                oracle_max_distance: Some(cmp.summary.polished_max_distance),
                oracle_mean_distance: Some(cmp.summary.polished_mean_distance),
                raw_max_distance: Some(cmp.summary.raw_max_distance),
                raw_mean_distance: Some(cmp.summary.raw_mean_distance),
                outliers: Some(cmp.summary.outliers),
            },
        }),
    }
}
