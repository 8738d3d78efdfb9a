/// Virtual time in whole microseconds so that sums of configured step
/// durations are exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimClock {
    now_us: u64,
}

impl SimClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now_us(&self) -> u64 {
        self.now_us
    }

    pub fn now_ms(&self) -> f64 {
        us_to_ms(self.now_us)
    }

    pub fn advance_us(&mut self, us: u64) {
        self.now_us += us;
    }
}

pub fn us_to_ms(us: u64) -> f64 {
    us as f64 / 1000.0
}

pub fn ms_to_us(ms: f64) -> u64 {
    (ms * 1000.0).round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn advances_monotonically() {
        let mut c = SimClock::new();
        assert_eq!(c.now_us(), 0);
        c.advance_us(369_300);
        c.advance_us(0);
        assert_eq!(c.now_ms(), 369.3);
    }

    #[test]
    fn ms_conversion_is_exact_for_configured_values() {
        for ms in [369.3, 19.64, 29.16, 116.1, 27.2] {
            assert_eq!(us_to_ms(ms_to_us(ms)), ms);
        }
    }
}
