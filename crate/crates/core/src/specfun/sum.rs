use num_complex::Complex64;

/// Floating-point format used for all evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatFormat {
    Binary64,
}

/// How long sums are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    Plain,
    #[default]
    Compensated,
}

/// Working-precision descriptor shared by the numeric modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Precision {
    pub working: FloatFormat,
    pub sum_mode: SumMode,
    pub target_abs_tol: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            working: FloatFormat::Binary64,
            sum_mode: SumMode::Compensated,
            target_abs_tol: 1e-12,
        }
    }
}

impl Precision {
    pub fn accumulator(&self) -> Accumulator {
        Accumulator::new(self.sum_mode)
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated or plain accumulator for complex terms.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    mode: SumMode,
    re: NeumaierSum,
    im: NeumaierSum,
}

impl Accumulator {
    pub fn new(mode: SumMode) -> Self {
        Accumulator {
            mode,
            re: NeumaierSum::new(),
            im: NeumaierSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        match self.mode {
            SumMode::Compensated => {
                self.re.add(z.re);
                self.im.add(z.im);
            }
            SumMode::Plain => {
                self.re.sum += z.re;
                self.im.sum += z.im;
            }
        }
    }

    #[inline]
    pub fn add_real(&mut self, x: f64) {
        self.add(Complex64::new(x, 0.0));
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a sequence of reals.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}
