//! Compensated summation with a fixed evaluation order.

/// Neumaier (improved Kahan) summation of the items in iteration order.
pub fn neumaier<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        assert_eq!(neumaier([1.0, 1e100, 1.0, -1e100]), 2.0);
        assert_eq!(neumaier(std::iter::empty()), 0.0);
    }
}
