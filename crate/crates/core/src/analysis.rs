//! Cross-subject analysis of relation spectra: same-sign ("same
//! contribution") items per finger and the finger-by-finger coupling
//! matrix of spectrum correlations.

use alloc::{format, string::String, vec, vec::Vec};
use core::cmp::Ordering;

use crate::{
    poly::Monomial,
    spectrum::{base_items, monomial_label},
    Error, RelationSpectrum, Result,
};

/// Coefficient vectors for every `(subject, finger)` pair over one shared
/// item table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCollection {
    subjects: Vec<String>,
    fingers: Vec<String>,
    item_labels: Vec<String>,
    /// `[subject][finger][item]`
    coefficients: Vec<Vec<Vec<f64>>>,
}

impl SpectrumCollection {
    pub fn new(
        subjects: Vec<String>,
        fingers: Vec<String>,
        item_labels: Vec<String>,
        coefficients: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::Empty("spectrum collection"));
        }
        if coefficients.len() != subjects.len() {
            return Err(Error::DimensionMismatch {
                context: "collection subjects",
                expected: subjects.len(),
                found: coefficients.len(),
            });
        }
        for per_subject in &coefficients {
            if per_subject.len() != fingers.len() {
                return Err(Error::DimensionMismatch {
                    context: "collection fingers",
                    expected: fingers.len(),
                    found: per_subject.len(),
                });
            }
            for v in per_subject {
                if v.len() != item_labels.len() {
                    return Err(Error::DimensionMismatch {
                        context: "collection items",
                        expected: item_labels.len(),
                        found: v.len(),
                    });
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite("collection coefficient".into()));
                }
            }
        }
        Ok(Self {
            subjects,
            fingers,
            item_labels,
            coefficients,
        })
    }

    /// Aligns per-subject spectra onto one item table: the block layout of
    /// the first spectrum's display order, then the union of extended
    /// items. All spectra must share variable and output names.
    pub fn from_spectra(subjects: Vec<String>, spectra: &[RelationSpectrum]) -> Result<Self> {
        let first = spectra.first().ok_or(Error::Empty("spectrum collection"))?;
        if subjects.len() != spectra.len() {
            return Err(Error::DimensionMismatch {
                context: "subject names",
                expected: spectra.len(),
                found: subjects.len(),
            });
        }
        for s in spectra {
            if s.variable_names() != first.variable_names()
                || s.output_names() != first.output_names()
            {
                return Err(Error::ContractViolation(
                    "spectra in a collection must share variable and output names".into(),
                ));
            }
        }
        let nvars = first.nvars();
        let order = first.display_order();
        let cap = spectra
            .iter()
            .filter_map(|s| s.truncation().map(|t| t.max_degree))
            .min()
            .unwrap_or(u32::MAX);
        let mut items: Vec<Monomial> = base_items(nvars, order)
            .into_iter()
            .filter(|m| m.degree() <= cap)
            .collect();
        let mut extended: Vec<Monomial> = spectra
            .iter()
            .flat_map(|s| {
                s.items()
                    .iter()
                    .filter(|i| i.extended)
                    .map(|i| i.monomial.clone())
            })
            .filter(|m| m.degree() <= cap)
            .collect();
        extended.sort_by(|a, b| a.grlex_cmp(b, order));
        extended.dedup();
        items.extend(extended);

        let coefficients = spectra
            .iter()
            .map(|s| {
                s.polys()
                    .iter()
                    .map(|p| items.iter().map(|m| p.coefficient(m)).collect())
                    .collect()
            })
            .collect();
        let item_labels = items
            .iter()
            .map(|m| monomial_label(m, first.variable_names(), order))
            .collect();
        Self::new(
            subjects,
            first.output_names().to_vec(),
            item_labels,
            coefficients,
        )
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn fingers(&self) -> &[String] {
        &self.fingers
    }

    pub fn item_labels(&self) -> &[String] {
        &self.item_labels
    }

    pub fn item_count(&self) -> usize {
        self.item_labels.len()
    }

    pub fn coefficients(&self, subject: usize, finger: usize) -> &[f64] {
        &self.coefficients[subject][finger]
    }

    /// Drops the constant item, if present.
    pub fn without_constant(&self) -> Self {
        let keep: Vec<usize> = (0..self.item_count())
            .filter(|&i| self.item_labels[i] != "1")
            .collect();
        Self {
            subjects: self.subjects.clone(),
            fingers: self.fingers.clone(),
            item_labels: keep.iter().map(|&i| self.item_labels[i].clone()).collect(),
            coefficients: self
                .coefficients
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|v| keep.iter().map(|&i| v[i]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Scales every `(subject, finger)` vector to unit L2 norm; all-zero
    /// vectors are left as they are.
    pub fn l2_normalized(&self) -> Self {
        let mut out = self.clone();
        for v in out.coefficients.iter_mut().flatten() {
            let norm = libm::sqrt(v.iter().map(|c| c * c).sum());
            if norm > 0.0 {
                v.iter_mut().for_each(|c| *c /= norm);
            }
        }
        out
    }

    /// Multiplies one subject's spectra by `factor`.
    pub fn rescale_subject(&mut self, subject: usize, factor: f64) {
        for v in &mut self.coefficients[subject] {
            v.iter_mut().for_each(|c| *c *= factor);
        }
    }

    fn check_finger(&self, finger: usize) -> Result<()> {
        if finger >= self.fingers.len() {
            return Err(Error::InvalidParameter(format!(
                "finger index {finger} out of range"
            )));
        }
        Ok(())
    }

    /// Percentage of subjects sharing the majority sign at `position`
    /// (1-based). Exact zeros count for neither sign.
    pub fn same_contribution(&self, finger: usize, position: usize) -> Result<f64> {
        self.check_finger(finger)?;
        if position == 0 || position > self.item_count() {
            return Err(Error::InvalidParameter(format!(
                "item position {position} out of range"
            )));
        }
        let (pos, neg) = self.sign_counts(finger, position - 1);
        Ok(pos.max(neg) as f64 / self.subjects.len() as f64 * 100.0)
    }

    fn sign_counts(&self, finger: usize, item: usize) -> (usize, usize) {
        self.coefficients.iter().fold((0, 0), |(p, n), s| {
            let c = s[finger][item];
            (p + usize::from(c > 0.0), n + usize::from(c < 0.0))
        })
    }

    /// Items whose same-contribution percentage reaches `threshold`, best
    /// first: by percentage, then mean |coefficient|, then position.
    pub fn synergy_report(&self, threshold: f64) -> Result<Vec<SynergyEntry>> {
        if !(0.0..=100.0).contains(&threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in [0, 100], got {threshold}"
            )));
        }
        let n = self.subjects.len() as f64;
        let mut report = Vec::new();
        for finger in 0..self.fingers.len() {
            let mut rows: Vec<SynergyEntry> = (0..self.item_count())
                .map(|item| {
                    let (pos, neg) = self.sign_counts(finger, item);
                    let values = self.coefficients.iter().map(|s| s[finger][item]);
                    let mean_coefficient = values.clone().sum::<f64>() / n;
                    let mean_abs = values.map(f64::abs).sum::<f64>() / n;
                    SynergyEntry {
                        finger,
                        position: item + 1,
                        label: self.item_labels[item].clone(),
                        same_contribution: pos.max(neg) as f64 / n * 100.0,
                        mean_coefficient,
                        mean_abs_coefficient: mean_abs,
                        sign: match pos.cmp(&neg) {
                            Ordering::Greater => 1,
                            Ordering::Less => -1,
                            Ordering::Equal => 0,
                        },
                    }
                })
                .filter(|e| e.same_contribution >= threshold)
                .collect();
            rows.sort_by(|a, b| {
                b.same_contribution
                    .total_cmp(&a.same_contribution)
                    .then(b.mean_abs_coefficient.total_cmp(&a.mean_abs_coefficient))
                    .then(a.position.cmp(&b.position))
            });
            report.extend(rows);
        }
        Ok(report)
    }

    /// Per-finger vectors used for the coupling correlation.
    pub fn finger_vectors(&self, aggregation: Aggregation) -> Vec<Vec<f64>> {
        (0..self.fingers.len())
            .map(|f| match aggregation {
                Aggregation::Concatenate => self
                    .coefficients
                    .iter()
                    .flat_map(|s| s[f].iter().copied())
                    .collect(),
                Aggregation::PerSubjectMean => {
                    let n = self.subjects.len() as f64;
                    (0..self.item_count())
                        .map(|i| self.coefficients.iter().map(|s| s[f][i]).sum::<f64>() / n)
                        .collect()
                }
            })
            .collect()
    }

    /// Pearson correlation between every pair of finger vectors.
    pub fn coupling_matrix(&self, aggregation: Aggregation) -> Result<CouplingMatrix> {
        let vectors = self.finger_vectors(aggregation);
        let len = vectors.first().map_or(0, Vec::len);
        if len < 2 {
            return Err(Error::InvalidParameter(
                "coupling needs at least two items after aggregation".into(),
            ));
        }
        let nf = vectors.len();
        let mut entries = vec![vec![None; nf]; nf];
        for a in 0..nf {
            for b in a..nf {
                let r = pearson(&vectors[a], &vectors[b]);
                entries[a][b] = r;
                entries[b][a] = r;
            }
        }
        Ok(CouplingMatrix {
            fingers: self.fingers.clone(),
            aggregation,
            entries,
        })
    }
}

/// Pearson correlation; `None` if either vector has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Every subject's vector appended end to end.
    Concatenate,
    /// Item-wise mean over subjects.
    PerSubjectMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub fingers: Vec<String>,
    pub aggregation: Aggregation,
    /// `None` marks an undefined entry (zero-variance finger vector).
    pub entries: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynergyEntry {
    pub finger: usize,
    pub position: usize,
    pub label: String,
    pub same_contribution: f64,
    pub mean_coefficient: f64,
    pub mean_abs_coefficient: f64,
    /// Majority sign; 0 on a tie.
    pub sign: i8,
}
