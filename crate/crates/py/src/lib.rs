//! Python bindings: `import pyudisc`.
//!
//! Matrices cross the boundary as nested lists of Python complex numbers
//! (floats are accepted on input). Library errors raise `UdiscError`, a
//! subclass of `ValueError`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use udisc::discriminator::{self, Family, Regime};
use udisc::sampler::{self, MeasurementInput, OutcomeDistribution};
use udisc::{io, mixed, Cap, ComplexMatrix, ComplexVector, HermitianOperator, PureState, Tolerances};

create_exception!(pyudisc, UdiscError, PyValueError);

fn err(e: udisc::Error) -> PyErr {
    UdiscError::new_err(e.to_string())
}

fn cap(value: Option<usize>) -> Cap {
    value.map_or_else(Cap::default, Cap)
}

fn to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m[(r, c)]).collect()).collect()
}

fn from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<HermitianOperator> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(UdiscError::new_err(format!("expected a square {d} × {d} matrix")));
    }
    HermitianOperator::new(ComplexMatrix::from_fn(d, d, |r, c| rows[r][c])).map_err(err)
}

fn parse_family(name: &str) -> PyResult<Family> {
    name.parse().map_err(err)
}

fn parse_regime(name: &str) -> PyResult<Regime> {
    match name {
        "equal" => Ok(Regime::Equal),
        "universal" => Ok(Regime::Universal),
        other => Err(UdiscError::new_err(format!("unknown regime `{other}`"))),
    }
}

/// An ordered set of pure states of equal dimension.
#[pyclass(name = "StateSet", module = "pyudisc")]
struct PyStateSet(udisc::StateSet);

#[pymethods]
impl PyStateSet {
    /// Each state is a list of amplitudes; states are normalized on entry.
    #[new]
    fn new(states: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let states = states
            .into_iter()
            .map(|v| PureState::new(ComplexVector::from_vec(v)))
            .collect::<udisc::Result<Vec<_>>>()
            .map_err(err)?;
        udisc::StateSet::new(states).map(PyStateSet).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        io::read_states(text).map(|f| PyStateSet(f.states)).map_err(err)
    }

    fn to_text(&self) -> String {
        io::write_states(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn gram(&self) -> Vec<Vec<Complex64>> {
        to_rows(&self.0.gram())
    }

    fn gram_determinant(&self) -> f64 {
        self.0.gram_determinant()
    }

    fn is_linearly_independent(&self) -> bool {
        self.0.is_linearly_independent()
    }

    /// Smallest Gram eigenvalue: the best minimax success when the states are known.
    fn known_state_optimum(&self) -> f64 {
        discriminator::known_state_optimum(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("StateSet(dim={}, len={})", self.0.dim(), self.0.len())
    }
}

/// A measurement on `n` program registers and one data register.
#[pyclass(name = "Povm", module = "pyudisc")]
struct PyPovm(discriminator::Povm);

#[pymethods]
impl PyPovm {
    /// `family` is one of `optimal`, `universal`, `trivial`.
    #[staticmethod]
    #[pyo3(signature = (family, m, n, cap=None))]
    fn build(family: &str, m: usize, n: usize, cap: Option<usize>) -> PyResult<Self> {
        discriminator::build_family(parse_family(family)?, m, n, self::cap(cap)).map(PyPovm).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, n, elements))]
    fn from_elements(m: usize, n: usize, elements: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ops = elements.into_iter().map(from_rows).collect::<PyResult<Vec<_>>>()?;
        discriminator::Povm::new(m, n, ops).map(PyPovm).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, cap=None))]
    fn from_text(text: &str, cap: Option<usize>) -> PyResult<Self> {
        io::read_povm(text, self::cap(cap)).map(PyPovm).map_err(err)
    }

    fn to_text(&self) -> String {
        io::write_povm(&self.0)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The constant `c` of a structured family, `None` for arbitrary POVMs.
    #[getter]
    fn constant(&self) -> Option<f64> {
        self.0.constant()
    }

    fn element(&self, k: usize) -> PyResult<Vec<Vec<Complex64>>> {
        if k > self.0.n() {
            return Err(err(udisc::Error::IndexOutOfRange { index: k, len: self.0.n() }));
        }
        Ok(to_rows(self.0.element(k).matrix()))
    }

    /// Positivity, completeness and leakage report.
    #[pyo3(signature = (cap=None))]
    fn verify<'py>(&self, py: Python<'py>, cap: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        let report = discriminator::unambiguity_report(&self.0, &Tolerances::default(), self::cap(cap)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("psd_residuals", report.povm.psd_residuals.clone())?;
        d.set_item("completeness_residual", report.povm.completeness_residual)?;
        d.set_item("valid", report.povm.valid)?;
        d.set_item("leakages", report.leakages.clone())?;
        d.set_item("max_leakage", report.max_leakage())?;
        d.set_item("unambiguous", report.unambiguous)?;
        d.set_item("pass", report.pass)?;
        Ok(d)
    }

    #[pyo3(signature = (trials=8, seed=0))]
    fn covariance<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let report = discriminator::check_covariance(&self.0, trials, seed, &Tolerances::default()).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("unitary_residual", report.unitary_residual)?;
        d.set_item("permutation_residual", report.permutation_residual)?;
        d.set_item("marginal_constants", report.marginal_constants.clone())?;
        d.set_item("marginal_residual", report.marginal_residual)?;
        d.set_item("pass", report.pass())?;
        Ok(d)
    }

    /// `[p_0, …, p_n]` for the input `|ψ_1⟩…|ψ_n⟩|ψ_which⟩`.
    fn outcome_probabilities(&self, states: &PyStateSet, which: usize) -> PyResult<Vec<f64>> {
        let input = discriminator::program_input(&states.0, which).map_err(err)?;
        let dist = sampler::outcome_distribution(&self.0, &MeasurementInput::Pure(input)).map_err(err)?;
        Ok(dist.probabilities().to_vec())
    }

    fn success_probability(&self, states: &PyStateSet, which: usize) -> PyResult<f64> {
        discriminator::success_prob_operational(&self.0, &states.0, which).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Povm(m={}, n={}, constant={:?})", self.0.m(), self.0.n(), self.0.constant())
    }
}

/// Closed-form success probability; `regime` is `equal` or `universal`.
#[pyfunction]
fn success_probability(states: &PyStateSet, regime: &str) -> PyResult<f64> {
    Ok(discriminator::success_prob_analytic(&states.0, parse_regime(regime)?))
}

/// `(lower, upper)` envelope for the universal success probability.
#[pyfunction]
fn efficiency_bounds(p_s: f64, n: usize) -> PyResult<(f64, f64)> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(UdiscError::new_err(format!("p_s = {p_s} outside [0, 1]")));
    }
    Ok(discriminator::efficiency_bounds(p_s, n))
}

/// Counts per outcome from `shots` draws of a ChaCha20 stream seeded with `seed`.
#[pyfunction]
fn sample(probabilities: Vec<f64>, shots: u64, seed: u64) -> PyResult<Vec<u64>> {
    let dist = OutcomeDistribution::from_outcomes(probabilities).map_err(err)?;
    sampler::sample(&dist, shots, seed).map(|r| r.counts).map_err(err)
}

/// Cores, program and part probabilities for mixed states.
///
/// `data` is the 1-based index of the density sent to the data register.
#[pyfunction]
#[pyo3(signature = (rhos, data, cap=None))]
fn mixed_report<'py>(
    py: Python<'py>,
    rhos: Vec<Vec<Vec<Complex64>>>,
    data: usize,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let rhos = rhos
        .into_iter()
        .map(|r| from_rows(r).and_then(|op| mixed::DensityOperator::new(op).map_err(err)))
        .collect::<PyResult<Vec<_>>>()?;
    if data == 0 || data > rhos.len() {
        return Err(err(udisc::Error::IndexOutOfRange { index: data, len: rhos.len() }));
    }
    let cores = mixed::core_decompose(&rhos).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("tilde_trace_0", cores.tilde0.trace())?;
    d.set_item("tilde_traces", cores.tilde_traces())?;
    d.set_item("discriminable", cores.discriminable())?;
    let program = mixed::build_program(&cores).map_err(err)?;
    d.set_item("part_sizes", program.parts.iter().map(|p| p.len()).collect::<Vec<_>>())?;
    let probs = mixed::part_probabilities(&program, &rhos[data - 1], self::cap(cap)).map_err(err)?;
    d.set_item("regime", format!("{:?}", probs.regime).to_lowercase())?;
    d.set_item("constant", probs.constant)?;
    d.set_item("inconclusive", probs.inconclusive)?;
    d.set_item("parts", probs.parts.clone())?;
    let bounds = mixed::bounds_check(&program, data, &probs).map_err(err)?;
    d.set_item("bound_lower", bounds.lower)?;
    d.set_item("bound_upper", bounds.upper.clone())?;
    d.set_item("bounds_ok", bounds.ok())?;
    Ok(d)
}

#[pymodule]
fn pyudisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UdiscError", m.py().get_type::<UdiscError>())?;
    m.add_class::<PyStateSet>()?;
    m.add_class::<PyPovm>()?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_report, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.25)],
            vec![Complex64::new(0.0, -0.25), Complex64::new(0.5, 0.0)],
        ];
        let op = from_rows(rows.clone()).unwrap();
        assert_eq!(to_rows(op.matrix()), rows);
    }

    #[test]
    fn ragged_and_non_hermitian_input_is_rejected() {
        let one = Complex64::new(1.0, 0.0);
        assert!(from_rows(vec![vec![one, one], vec![one]]).is_err());
        assert!(from_rows(vec![vec![one, one], vec![-one, one]]).is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!(parse_family("trivial").unwrap(), Family::Trivial);
        assert_eq!(parse_regime("equal").unwrap(), Regime::Equal);
        assert!(parse_regime("other").is_err());
    }
}
