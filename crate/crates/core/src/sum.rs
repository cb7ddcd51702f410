/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub(crate) fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Compensated::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

impl Compensated {
    /// Adds `s * (a - b)` with the difference and the product split into
    /// exact leading terms and rounding residues.
    pub(crate) fn add_scaled_diff(&mut self, s: f64, a: f64, b: f64) {
        let d = a - b;
        let bv = d - a;
        let av = d - bv;
        let d_err = (a - av) + (-b - bv);
        let p = s * d;
        let p_err = s.mul_add(d, -p);
        self.add(p);
        self.add(p_err + s * d_err);
    }
}
