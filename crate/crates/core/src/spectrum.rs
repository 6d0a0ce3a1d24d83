//! Relation spectra: the exact polynomial a Dendrite Net computes, laid
//! out as an ordered item table with one coefficient list per output.
//!
//! Items up to degree two follow a block layout: for each leading variable
//! `v` (in display order) the square `v²`, then `v·w` for every later
//! variable `w`, then `v` itself; the constant item closes the table. With
//! six variables this yields 28 items. Higher-degree items, which appear
//! once a net has two or more modules, are appended after the constant in
//! graded order and marked as extended.

use alloc::{format, string::String, vec, vec::Vec};

use crate::{dendrite::DDModel, poly::Monomial, Error, Result, SparsePoly};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumItem {
    pub monomial: Monomial,
    /// Degree above two; sits after the constant item.
    pub extended: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    /// 1-based index into the item table.
    pub position: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub max_degree: u32,
    /// Σ|c| of the dropped items, per output.
    pub dropped_abs_mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpectrum {
    variable_names: Vec<String>,
    output_names: Vec<String>,
    display_order: Vec<usize>,
    items: Vec<SpectrumItem>,
    outputs: Vec<Vec<SpectrumEntry>>,
    truncation: Option<TruncationReport>,
}

/// Degree-≤2 items in block order for the given variable priority.
pub fn base_items(nvars: usize, order: &[usize]) -> Vec<Monomial> {
    let mut items = Vec::with_capacity((nvars + 1) * (nvars + 2) / 2);
    for (k, &lead) in order.iter().enumerate() {
        let mut sq = vec![0u16; nvars];
        sq[lead] = 2;
        items.push(Monomial::new(sq));
        for &other in &order[k + 1..] {
            let mut e = vec![0u16; nvars];
            e[lead] = 1;
            e[other] = 1;
            items.push(Monomial::new(e));
        }
        items.push(Monomial::variable(nvars, lead));
    }
    items.push(Monomial::one(nvars));
    items
}

fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl RelationSpectrum {
    /// Lays out `polys` (one per output) in block order over
    /// `display_order`, a permutation of variable indices.
    pub fn from_polys(
        variable_names: Vec<String>,
        output_names: Vec<String>,
        polys: &[SparsePoly],
        display_order: Vec<usize>,
    ) -> Result<Self> {
        Self::build(variable_names, output_names, polys, display_order, None)
    }

    /// Like [`RelationSpectrum::from_polys`] for a spectrum that was already
    /// truncated; the item table is capped at the report's degree.
    pub fn from_truncated_polys(
        variable_names: Vec<String>,
        output_names: Vec<String>,
        polys: &[SparsePoly],
        display_order: Vec<usize>,
        truncation: TruncationReport,
    ) -> Result<Self> {
        if let Some(p) = polys
            .iter()
            .find(|p| p.degree().is_some_and(|d| d > truncation.max_degree))
        {
            return Err(Error::ContractViolation(format!(
                "degree {:?} term in a spectrum truncated at {}",
                p.degree(),
                truncation.max_degree
            )));
        }
        if truncation.dropped_abs_mass.len() != polys.len() {
            return Err(Error::DimensionMismatch {
                context: "truncation report",
                expected: polys.len(),
                found: truncation.dropped_abs_mass.len(),
            });
        }
        Self::build(
            variable_names,
            output_names,
            polys,
            display_order,
            Some(truncation),
        )
    }

    fn build(
        variable_names: Vec<String>,
        output_names: Vec<String>,
        polys: &[SparsePoly],
        display_order: Vec<usize>,
        truncation: Option<TruncationReport>,
    ) -> Result<Self> {
        let nvars = variable_names.len();
        if output_names.len() != polys.len() {
            return Err(Error::DimensionMismatch {
                context: "output names",
                expected: polys.len(),
                found: output_names.len(),
            });
        }
        if let Some(p) = polys.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::VariableCountMismatch {
                left: nvars,
                right: p.nvars(),
            });
        }
        check_permutation(&display_order, nvars)?;

        let cap = truncation.as_ref().map_or(u32::MAX, |t| t.max_degree);
        let mut items: Vec<SpectrumItem> = base_items(nvars, &display_order)
            .into_iter()
            .filter(|m| m.degree() <= cap)
            .map(|monomial| SpectrumItem {
                monomial,
                extended: false,
            })
            .collect();
        let mut extra: Vec<Monomial> = polys
            .iter()
            .flat_map(|p| p.terms().map(|(m, _)| m))
            .filter(|m| m.degree() > 2)
            .cloned()
            .collect();
        extra.sort_by(|a, b| a.grlex_cmp(b, &display_order));
        extra.dedup();
        items.extend(extra.into_iter().map(|monomial| SpectrumItem {
            monomial,
            extended: true,
        }));

        let outputs = polys
            .iter()
            .map(|p| {
                let mut entries: Vec<SpectrumEntry> = items
                    .iter()
                    .enumerate()
                    .filter_map(|(i, item)| {
                        let c = p.coefficient(&item.monomial);
                        (c != 0.0).then_some(SpectrumEntry {
                            position: i + 1,
                            coefficient: c,
                        })
                    })
                    .collect();
                entries.sort_by_key(|e| e.position);
                entries
            })
            .collect();

        Ok(Self {
            variable_names,
            output_names,
            display_order,
            items,
            outputs,
            truncation,
        })
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn display_order(&self) -> &[usize] {
        &self.display_order
    }

    pub fn items(&self) -> &[SpectrumItem] {
        &self.items
    }

    pub fn outputs(&self) -> &[Vec<SpectrumEntry>] {
        &self.outputs
    }

    pub fn truncation(&self) -> Option<&TruncationReport> {
        self.truncation.as_ref()
    }

    pub fn nvars(&self) -> usize {
        self.variable_names.len()
    }

    /// Highest degree with a nonzero coefficient in any output.
    pub fn degree(&self) -> Option<u32> {
        self.outputs
            .iter()
            .flatten()
            .map(|e| self.items[e.position - 1].monomial.degree())
            .max()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.iter().all(Vec::is_empty)
    }

    /// Replaces the default `x1…`/`y1…` names. Positions are unaffected.
    pub fn with_names(
        mut self,
        variable_names: Vec<String>,
        output_names: Vec<String>,
    ) -> Result<Self> {
        if variable_names.len() != self.variable_names.len() {
            return Err(Error::DimensionMismatch {
                context: "variable names",
                expected: self.variable_names.len(),
                found: variable_names.len(),
            });
        }
        if output_names.len() != self.output_names.len() {
            return Err(Error::DimensionMismatch {
                context: "output names",
                expected: self.output_names.len(),
                found: output_names.len(),
            });
        }
        self.variable_names = variable_names;
        self.output_names = output_names;
        Ok(self)
    }

    /// Item label such as `E_FPL^2`, `E_FPL*E_FDP` or `1`, with factors in
    /// display order.
    pub fn label(&self, position: usize) -> String {
        monomial_label(
            &self.items[position - 1].monomial,
            &self.variable_names,
            &self.display_order,
        )
    }

    pub fn labels(&self) -> Vec<String> {
        (1..=self.items.len()).map(|p| self.label(p)).collect()
    }

    /// Coefficient of every item for one output, zeros included.
    pub fn coefficient_vector(&self, output: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.items.len()];
        for e in &self.outputs[output] {
            v[e.position - 1] = e.coefficient;
        }
        v
    }

    pub fn polys(&self) -> Vec<SparsePoly> {
        self.outputs
            .iter()
            .map(|entries| {
                SparsePoly::from_terms(
                    self.nvars(),
                    entries
                        .iter()
                        .map(|e| (self.items[e.position - 1].monomial.clone(), e.coefficient)),
                )
            })
            .collect()
    }

    /// Reorders the item table for a new variable display order, given by
    /// name. Coefficients are untouched.
    pub fn canonical_order<S: AsRef<str>>(&self, variable_order: &[S]) -> Result<Self> {
        let order = variable_order
            .iter()
            .map(|name| {
                self.variable_names
                    .iter()
                    .position(|v| v == name.as_ref())
                    .ok_or_else(|| {
                        Error::InvalidPermutation(format!("unknown variable {:?}", name.as_ref()))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(
            self.variable_names.clone(),
            self.output_names.clone(),
            &self.polys(),
            order,
            self.truncation.clone(),
        )
    }

    /// Σ coefficient · Π x_i^{e_i} per output; `x` excludes the bias.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                context: "spectrum evaluation",
                expected: self.nvars(),
                found: x.len(),
            });
        }
        let values: Vec<f64> = self.items.iter().map(|it| it.monomial.eval(x)).collect();
        Ok(self
            .outputs
            .iter()
            .map(|entries| {
                entries
                    .iter()
                    .map(|e| e.coefficient * values[e.position - 1])
                    .sum()
            })
            .collect())
    }

    /// Drops items above `max_degree` and renumbers the table.
    pub fn truncate(&self, max_degree: u32) -> Self {
        let dropped_abs_mass = self
            .outputs
            .iter()
            .map(|entries| {
                entries
                    .iter()
                    .filter(|e| self.items[e.position - 1].monomial.degree() > max_degree)
                    .map(|e| e.coefficient.abs())
                    .sum()
            })
            .collect::<Vec<f64>>();
        let kept: Vec<SparsePoly> = self
            .polys()
            .into_iter()
            .map(|p| {
                SparsePoly::from_terms(
                    p.nvars(),
                    p.terms()
                        .filter(|(m, _)| m.degree() <= max_degree)
                        .map(|(m, c)| (m.clone(), c)),
                )
            })
            .collect();
        let dropped_abs_mass = match &self.truncation {
            Some(prev) => prev
                .dropped_abs_mass
                .iter()
                .zip(&dropped_abs_mass)
                .map(|(a, b)| a + b)
                .collect(),
            None => dropped_abs_mass,
        };
        let max_degree = self
            .truncation
            .as_ref()
            .map_or(max_degree, |t| t.max_degree.min(max_degree));
        Self::build(
            self.variable_names.clone(),
            self.output_names.clone(),
            &kept,
            self.display_order.clone(),
            Some(TruncationReport {
                max_degree,
                dropped_abs_mass,
            }),
        )
        .expect("rebuilding a valid spectrum")
    }
}

pub fn monomial_label<S: AsRef<str>>(m: &Monomial, names: &[S], display_order: &[usize]) -> String {
    if m.is_constant() {
        return "1".into();
    }
    let mut parts = Vec::new();
    for &i in display_order {
        match m.exponents()[i] {
            0 => {}
            1 => parts.push(String::from(names[i].as_ref())),
            e => parts.push(format!("{}^{e}", names[i].as_ref())),
        }
    }
    parts.join("*")
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} variables, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || core::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidPermutation(format!(
                "index {i} repeated or out of range"
            )));
        }
    }
    Ok(())
}

/// Exact polynomial of each model output over the real input variables.
pub fn expand_polys(model: &DDModel) -> Result<Vec<SparsePoly>> {
    let arch = model.architecture();
    let nvars = arch.variable_count();
    let inputs: Vec<SparsePoly> = (0..arch.input_dim())
        .map(|i| {
            if i == 0 {
                SparsePoly::constant(nvars, 1.0)
            } else {
                SparsePoly::variable(nvars, i - 1)
            }
        })
        .collect();
    let one = SparsePoly::constant(nvars, 1.0);

    let mut current = inputs.clone();
    for (l, w) in model.weights().iter().enumerate() {
        let mut next = Vec::with_capacity(w.rows());
        for j in 0..w.rows() {
            let mut mix = SparsePoly::zero(nvars);
            for (k, a) in current.iter().enumerate() {
                mix.add_scaled(a, w[(j, k)])?;
            }
            if l < arch.module_count() {
                let gate = &inputs[arch.gate_index(j)];
                mix = if arch.residual_flags()[l] {
                    mix.mul(&gate.add(&one)?)?
                } else {
                    mix.mul(gate)?
                };
            }
            next.push(mix);
        }
        current = next;
    }
    Ok(current)
}

/// Expands a model into its relation spectrum with default names
/// (`x1…`, `y1…`) and variables displayed in input order.
pub fn expand_model(model: &DDModel) -> Result<RelationSpectrum> {
    let polys = expand_polys(model)?;
    let nvars = model.architecture().variable_count();
    RelationSpectrum::from_polys(
        default_names("x", nvars),
        default_names("y", polys.len()),
        &polys,
        (0..nvars).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{dendrite::init_model, Architecture, Matrix};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn zero_model_expands_to_empty_spectrum() {
        let arch = Architecture::new(4, vec![4, 4, 3], vec![false, true]).unwrap();
        let s = expand_model(&DDModel::zeros(arch)).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.outputs().len(), 3);
        assert_eq!(s.evaluate(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_expansion_single_module() {
        // A1 = [a + b x, c x + d x²], out = A1_0 + A1_1
        let (a, b, c, d) = (0.5, -1.25, 2.0, 3.5);
        let arch = Architecture::plain(2, &[2], 1).unwrap();
        let w0 = Matrix::from_rows(&[[a, b], [c, d]]).unwrap();
        let w1 = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let s = expand_model(&DDModel::new(arch, vec![w0, w1]).unwrap()).unwrap();
        // items: x², x, 1
        assert_eq!(s.labels(), names(&["x1^2", "x1", "1"]));
        assert_eq!(s.coefficient_vector(0), vec![d, b + c, a]);
        assert_eq!(
            s.evaluate(&[2.0]).unwrap(),
            vec![a + 2.0 * (b + c) + 4.0 * d]
        );
    }

    #[test]
    fn item_order_small_cases() {
        let one = base_items(1, &[0]);
        assert_eq!(
            one.iter()
                .map(|m| m.exponents().to_vec())
                .collect::<Vec<_>>(),
            vec![vec![2], vec![1], vec![0]]
        );
        let s = RelationSpectrum::from_polys(
            names(&["a", "b"]),
            names(&["y"]),
            &[SparsePoly::zero(2)],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(s.labels(), names(&["a^2", "a*b", "a", "b^2", "b", "1"]));
        let s = s.canonical_order(&["b", "a"]).unwrap();
        assert_eq!(s.labels(), names(&["b^2", "b*a", "b", "a^2", "a", "1"]));
    }

    #[test]
    fn invalid_permutation_rejected() {
        let s = RelationSpectrum::from_polys(
            names(&["a", "b"]),
            names(&["y"]),
            &[SparsePoly::zero(2)],
            vec![0, 1],
        )
        .unwrap();
        assert!(matches!(
            s.canonical_order(&["a"]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            s.canonical_order(&["a", "a"]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            s.canonical_order(&["a", "c"]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(RelationSpectrum::from_polys(
            names(&["a", "b"]),
            names(&["y"]),
            &[SparsePoly::zero(2)],
            vec![1, 1]
        )
        .is_err());
    }

    #[test]
    fn canonical_order_keeps_coefficients() {
        let arch = Architecture::plain(4, &[4, 4], 2).unwrap();
        let m = init_model(&arch, 0.5, 9).unwrap();
        let s = expand_model(&m).unwrap();
        let r = s.canonical_order(&["x3", "x1", "x2"]).unwrap();
        assert_eq!(s.polys(), r.polys());
        assert_eq!(r.items().len(), s.items().len());
        let x = [0.3, -1.1, 0.8];
        for (a, b) in s.evaluate(&x).unwrap().iter().zip(r.evaluate(&x).unwrap()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn extended_items_follow_constant() {
        let arch = Architecture::plain(3, &[3, 3], 1).unwrap();
        let s = expand_model(&init_model(&arch, 0.5, 1).unwrap()).unwrap();
        assert_eq!(s.degree(), Some(3));
        let constant = s
            .items()
            .iter()
            .position(|i| i.monomial.is_constant())
            .unwrap();
        assert_eq!(constant + 1, 6);
        assert!(s.items()[..=constant].iter().all(|i| !i.extended));
        assert!(s.items()[constant + 1..]
            .iter()
            .all(|i| i.extended && i.monomial.degree() == 3));
        assert_eq!(s.label(7), "x1^3");
    }

    #[test]
    fn truncation() {
        let arch = Architecture::plain(3, &[3, 3], 2).unwrap();
        let s = expand_model(&init_model(&arch, 0.5, 5).unwrap()).unwrap();
        assert_eq!(s.truncate(3).polys(), s.polys());
        assert_eq!(
            s.truncate(3).truncation().unwrap().dropped_abs_mass,
            vec![0.0, 0.0]
        );

        let t2 = s.truncate(2);
        assert_eq!(t2.items().len(), 6);
        let mass: f64 = s.outputs()[0]
            .iter()
            .filter(|e| e.position > 6)
            .map(|e| e.coefficient.abs())
            .sum();
        assert_eq!(t2.truncation().unwrap().dropped_abs_mass[0], mass);

        let t0 = s.truncate(0);
        assert_eq!(t0.items().len(), 1);
        assert!(t0.items()[0].monomial.is_constant());
        assert_eq!(t0.label(1), "1");
    }

    #[test]
    fn evaluate_dimension_checked() {
        let s = expand_model(&DDModel::zeros(Architecture::plain(3, &[3], 1).unwrap())).unwrap();
        assert!(matches!(
            s.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn residual_expansion_matches_forward() {
        let arch = Architecture::new(3, vec![5, 2, 2], vec![true, false]).unwrap();
        let m = init_model(&arch, 0.7, 77).unwrap();
        let s = expand_model(&m).unwrap();
        let x = [1.0, 0.4, -1.3];
        let f = m.forward(&x).unwrap();
        let e = s.evaluate(&x[1..]).unwrap();
        for (a, b) in f.iter().zip(&e) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
