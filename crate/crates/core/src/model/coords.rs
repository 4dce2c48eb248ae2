use super::Geometry;
use crate::error::{Error, Result};

/// A point of the radial variable x = 1/(1 + (ρ/2a)²) carried together with
/// its complement 1 − x, so that both ends of (0, 1) keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XPoint {
    pub x: f64,
    pub complement: f64,
}

impl XPoint {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange {
                what: "x",
                value: x,
                range: "[0, 1]",
            });
        }
        Ok(Self {
            x,
            complement: 1.0 - x,
        })
    }
}

/// Stereographic maps between the polar angle θ, the plane radius ρ and x.
///
/// tan(θ/2) = ρ/2a, x = 1/(1 + (ρ/2a)²) = cos²(θ/2). The area element
/// ρ dρ/(1 + (ρ/2a)²)² = a² sin θ dθ equals 2a²·|dx|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereographicMap {
    radius: f64,
}

impl StereographicMap {
    pub fn new(geometry: Geometry) -> Result<Self> {
        geometry
            .radius()
            .map(|radius| Self { radius })
            .ok_or(Error::RequiresSphere)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rho_from_theta(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        Ok(2.0 * self.radius * (0.5 * theta).tan())
    }

    pub fn theta_from_rho(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(2.0 * (rho / (2.0 * self.radius)).atan())
    }

    pub fn x_from_rho(&self, rho: f64) -> Result<XPoint> {
        check_rho(rho)?;
        let t = (rho / (2.0 * self.radius)).powi(2);
        Ok(XPoint {
            x: 1.0 / (1.0 + t),
            complement: t / (1.0 + t),
        })
    }

    pub fn rho_from_x(&self, point: XPoint) -> Result<f64> {
        check_open_x(point.x)?;
        Ok(2.0 * self.radius * (point.complement / point.x).sqrt())
    }

    pub fn x_from_theta(&self, theta: f64) -> Result<XPoint> {
        check_theta(theta)?;
        Ok(XPoint {
            x: (0.5 * theta).cos().powi(2),
            complement: (0.5 * theta).sin().powi(2),
        })
    }

    pub fn theta_from_x(&self, point: XPoint) -> Result<f64> {
        check_open_x(point.x)?;
        Ok(2.0 * point.complement.sqrt().atan2(point.x.sqrt()))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "rho",
            value: rho,
            range: "[0, inf)",
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < std::f64::consts::PI {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "theta",
            value: theta,
            range: "(0, pi)",
        })
    }
}

fn check_open_x(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "x",
            value: x,
            range: "(0, 1)",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::FRAC_PI_2;

    fn unit() -> StereographicMap {
        StereographicMap::new(Geometry::sphere(1.0).unwrap()).unwrap()
    }

    #[test]
    fn equator() {
        let map = unit();
        let rho = map.rho_from_theta(FRAC_PI_2).unwrap();
        assert!((rho - 2.0).abs() < 1e-15);
        let x = map.x_from_rho(rho).unwrap();
        assert!((x.x - 0.5).abs() < 1e-15);
        let via_theta = map.x_from_theta(FRAC_PI_2).unwrap();
        assert!((via_theta.x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn origin_maps_to_one() {
        let x = unit().x_from_rho(0.0).unwrap();
        assert_eq!((x.x, x.complement), (1.0, 0.0));
    }

    #[test]
    fn x_tends_to_zero_far_out() {
        assert!(unit().x_from_rho(1e8).unwrap().x < 1e-15);
    }

    #[test]
    fn round_trip_through_x() {
        let map = StereographicMap::new(Geometry::sphere(1.0).unwrap()).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let rho = 10f64.powf(rng.gen_range(-3.0..3.0));
            let back = map.rho_from_x(map.x_from_rho(rho).unwrap()).unwrap();
            assert!((back - rho).abs() <= 1e-12 * rho, "{rho} -> {back}");
            let theta = map.theta_from_rho(rho).unwrap();
            let via_theta = map.theta_from_x(map.x_from_theta(theta).unwrap()).unwrap();
            assert!((via_theta - theta).abs() <= 1e-12 * theta);
        }
    }

    #[test]
    fn measure_is_uniform_in_x() {
        // ρ/(1+(ρ/2a)²)² dρ = 2a² |dx|, checked by a central difference of x(ρ).
        let a = 1.7;
        let map = StereographicMap::new(Geometry::sphere(a).unwrap()).unwrap();
        for rho in [0.1, 1.0, 3.0, 20.0] {
            let h = 1e-5 * rho;
            let dx = (map.x_from_rho(rho + h).unwrap().x - map.x_from_rho(rho - h).unwrap().x) / (2.0 * h);
            let stretch = 1.0 + (rho / (2.0 * a)).powi(2);
            let jac = rho / (stretch * stretch);
            assert!((2.0 * a * a * dx.abs() - jac).abs() < 1e-8 * jac);
        }
    }

    #[test]
    fn out_of_range_inputs() {
        let map = unit();
        assert!(map.rho_from_theta(0.0).is_err());
        assert!(map.rho_from_theta(std::f64::consts::PI).is_err());
        assert!(map.x_from_rho(-1.0).is_err());
        assert!(map.rho_from_x(XPoint::new(1.0).unwrap()).is_err());
        assert!(XPoint::new(1.5).is_err());
        assert!(StereographicMap::new(Geometry::Flat).is_err());
    }
}
