//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be anything whose `str()` is `p/q`, an integer or a decimal.

use annular_rasmussen::braid::{parse_braid, BraidWord, Sign};
use annular_rasmussen::cli::{self, parse_rational};
use annular_rasmussen::invariants::{BraidInvariants, InvariantError, QpObstruction};
use annular_rasmussen::Rational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((x.to_string(),))
}

fn from_py(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&x.str()?.to_string()).map_err(PyValueError::new_err)
}

fn invariant_err(e: InvariantError) -> PyErr {
    match e {
        InvariantError::Braid(_) | InvariantError::BadDenominator => {
            PyValueError::new_err(e.to_string())
        }
        InvariantError::Grade(annular_rasmussen::filtgrade::GradeError::TOutOfRange(_)) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A braid word on `strands` strands; letter `±i` is `σ_i^{±1}`.
#[pyclass(name = "Braid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBraid {
    word: BraidWord,
}

#[pymethods]
impl PyBraid {
    /// `Braid("3: 1 -2 1")` or `Braid(3, [1, -2, 1])`.
    #[new]
    #[pyo3(signature = (braid, letters=None))]
    fn new(braid: &Bound<'_, PyAny>, letters: Option<Vec<i32>>) -> PyResult<Self> {
        let word = match letters {
            Some(letters) => BraidWord::new(braid.extract::<usize>()?, letters),
            None => parse_braid(&braid.extract::<String>()?),
        }
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyBraid { word })
    }

    #[getter]
    fn strands(&self) -> usize {
        self.word.strands()
    }

    #[getter]
    fn letters(&self) -> Vec<i32> {
        self.word.letters().to_vec()
    }

    #[getter]
    fn writhe(&self) -> i64 {
        self.word.writhe()
    }

    #[getter]
    fn self_linking(&self) -> i64 {
        self.word.self_linking()
    }

    fn inverse(&self) -> Self {
        PyBraid { word: self.word.inverse() }
    }

    fn conjugate(&self, g: &PyBraid) -> PyResult<Self> {
        let word = self
            .word
            .conjugate(&g.word)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyBraid { word })
    }

    fn stabilize(&self, positive: bool) -> Self {
        let sign = if positive { Sign::Positive } else { Sign::Negative };
        PyBraid { word: self.word.stabilize(sign) }
    }

    /// Places `inner` inside this braid's annulus.
    fn annular_compose(&self, inner: &PyBraid) -> Self {
        PyBraid { word: self.word.annular_compose(&inner.word) }
    }

    fn __str__(&self) -> String {
        self.word.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Braid({:?})", self.word.to_string())
    }

    fn __eq__(&self, other: &PyBraid) -> bool {
        self.word == other.word
    }
}

/// The complex of a braid closure, built once.
#[pyclass(name = "BraidInvariants", frozen)]
struct PyInvariants {
    inner: BraidInvariants,
}

#[pymethods]
impl PyInvariants {
    #[new]
    #[pyo3(signature = (braid, cap=None))]
    fn new(py: Python<'_>, braid: &PyBraid, cap: Option<usize>) -> PyResult<Self> {
        let cap = cap.unwrap_or_else(cli::default_cap);
        let word = braid.word.clone();
        let inner = py
            .detach(|| BraidInvariants::new(&word, cap))
            .map_err(invariant_err)?;
        Ok(PyInvariants { inner })
    }

    #[getter]
    fn braid(&self) -> PyBraid {
        PyBraid { word: self.inner.word().clone() }
    }

    /// `d_t` for `t` in `[0, 2]`.
    fn dt<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let t = from_py(t)?;
        let d = py.detach(|| self.inner.dt_at(&t)).map_err(invariant_err)?;
        to_fraction(py, &d)
    }

    /// `d_t` by dense rank computations; slow, for cross-checking.
    fn dt_oracle<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let t = from_py(t)?;
        let d = py.detach(|| self.inner.dt_oracle(&t)).map_err(invariant_err)?;
        to_fraction(py, &d)
    }

    fn s_invariant(&self, py: Python<'_>) -> PyResult<i64> {
        py.detach(|| self.inner.s_invariant()).map_err(invariant_err)
    }

    fn psi_nonzero(&self, py: Python<'_>) -> bool {
        py.detach(|| self.inner.psi_is_nonzero())
    }

    /// `"consistent"` or `"not_quasipositive"`.
    fn qp_obstruction(&self, py: Python<'_>) -> PyResult<&'static str> {
        Ok(match py.detach(|| self.inner.qp_obstruction()).map_err(invariant_err)? {
            QpObstruction::Consistent => "consistent",
            QpObstruction::NotQuasipositive => "not_quasipositive",
        })
    }

    /// `{"samples": [(t, d)], "segments": [dict]}` with `Fraction` values.
    #[pyo3(signature = (denominator=24, max_refine=4))]
    fn profile<'py>(
        &self,
        py: Python<'py>,
        denominator: u32,
        max_refine: u32,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = py
            .detach(|| self.inner.profile(denominator, max_refine))
            .map_err(invariant_err)?;
        let samples = PyList::empty(py);
        for s in &p.samples {
            samples.append((to_fraction(py, &s.t)?, to_fraction(py, &s.d)?))?;
        }
        let segments = PyList::empty(py);
        for g in &p.segments {
            let d = PyDict::new(py);
            d.set_item("t0", to_fraction(py, &g.t0)?)?;
            d.set_item("t1", to_fraction(py, &g.t1)?)?;
            d.set_item("slope", to_fraction(py, &g.slope)?)?;
            d.set_item("intercept", to_fraction(py, &g.intercept)?)?;
            d.set_item("certified", g.certified)?;
            segments.append(d)?;
        }
        let out = PyDict::new(py);
        out.set_item("samples", samples)?;
        out.set_item("segments", segments)?;
        Ok(out)
    }

    /// The JSON document of the `report` command.
    #[pyo3(signature = (denominator=24, max_refine=4))]
    fn report_json(&self, py: Python<'_>, denominator: u32, max_refine: u32) -> PyResult<String> {
        let mut config = cli::RunConfig::new(
            cli::Command::Report { t0s: Vec::new() },
            self.inner.word().to_string(),
        );
        config.denominator = denominator;
        config.max_refine = max_refine;
        let out = py.detach(|| cli::run(&config));
        if out.code == 0 {
            Ok(out.output)
        } else {
            Err(PyRuntimeError::new_err(out.output))
        }
    }
}

/// Runs the command-line program on `args` (without the program name);
/// returns `(exit_code, output)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("annular-rasmussen".to_string())
        .chain(args)
        .collect();
    let out = py.detach(|| cli::main_with_args(argv));
    (out.code, out.output)
}

#[pymodule]
#[pyo3(name = "annular_rasmussen")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBraid>()?;
    m.add_class::<PyInvariants>()?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
