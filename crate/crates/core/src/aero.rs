//! Reduced-order thrust and arm-interaction efficiency.
//!
//! Efficiency is the ratio of the thrust delivered with the arm in the
//! slipstream to that of the isolated propeller at the same speed, so it never
//! exceeds one at the tabulated operating points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Motor position (fraction of arm chord) that maximizes efficiency at nominal thrust.
pub const OPTIMAL_MOTOR_STATION: f64 = 0.83;

/// Tabulated efficiencies are valid for arm angles within this bound, deg.
pub const TABLE_ARM_ANGLE_LIMIT_DEG: f64 = 20.0;

/// (rpm, efficiency) at the optimal motor station.
pub const TABLE_EFFICIENCY: [(f64, f64); 3] = [(4000.0, 0.895), (5000.0, 0.909), (6000.0, 0.916)];

pub const NOMINAL_RPM: f64 = 4000.0;
/// About 500 g of thrust, N.
pub const NOMINAL_THRUST: f64 = 0.5 * 9.81;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AeroError {
    #[error("efficiency table is empty")]
    EmptyTable,
    #[error("invalid efficiency table: {0}")]
    InvalidTable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("efficiency model calibration failed: {0}")]
    CalibrationFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyTable {
    rows: Vec<(f64, f64)>,
}

impl EfficiencyTable {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self, AeroError> {
        if rows.is_empty() {
            return Err(AeroError::EmptyTable);
        }
        if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(AeroError::InvalidTable("rpm must be strictly increasing".into()));
        }
        if let Some(&(rpm, eta)) = rows.iter().find(|(r, e)| !r.is_finite() || !(*e > 0.0 && *e <= 1.0)) {
            return Err(AeroError::InvalidTable(format!("row ({rpm}, {eta}): eta must be in (0, 1]")));
        }
        Ok(Self { rows })
    }

    pub fn paper() -> Self {
        Self::new(TABLE_EFFICIENCY.to_vec()).expect("table is valid")
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    /// Piecewise-linear in rpm, clamped to the end rows.
    pub fn lookup(&self, rpm: f64) -> f64 {
        let rows = &self.rows;
        let first = rows[0];
        let last = rows[rows.len() - 1];
        if rpm <= first.0 {
            return first.1;
        }
        if rpm >= last.0 {
            return last.1;
        }
        let hi = rows.partition_point(|r| r.0 <= rpm);
        let (r0, e0) = rows[hi - 1];
        let (r1, e1) = rows[hi];
        if rpm == r0 {
            return e0;
        }
        e0 + (e1 - e0) * (rpm - r0) / (r1 - r0)
    }
}

pub fn efficiency_lookup(table: &EfficiencyTable, rpm: f64) -> f64 {
    table.lookup(rpm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropellerModel {
    /// N / rpm^2
    pub thrust_coefficient: f64,
    pub nominal_rpm: f64,
    /// N
    pub nominal_thrust: f64,
}

impl PropellerModel {
    /// Quadratic thrust law through one (rpm, thrust) operating point.
    pub fn calibrated(nominal_rpm: f64, nominal_thrust: f64) -> Result<Self, AeroError> {
        if !(nominal_rpm > 0.0 && nominal_thrust > 0.0) {
            return Err(AeroError::InvalidInput("nominal rpm and thrust must be > 0".into()));
        }
        Ok(Self { thrust_coefficient: nominal_thrust / (nominal_rpm * nominal_rpm), nominal_rpm, nominal_thrust })
    }

    pub fn nominal() -> Self {
        Self::calibrated(NOMINAL_RPM, NOMINAL_THRUST).expect("positive constants")
    }

    /// Speed that produces `thrust`, rpm.
    pub fn rpm_for_thrust(&self, thrust: f64) -> f64 {
        (thrust.max(0.0) / self.thrust_coefficient).sqrt()
    }
}

pub fn thrust_from_rpm(model: &PropellerModel, rpm: f64) -> f64 {
    model.thrust_coefficient * rpm * rpm
}

/// Vertical component of the delivered thrust for an arm inclined by `arm_angle_deg`.
pub fn net_vertical_thrust(thrust: f64, arm_angle_deg: f64, eta: f64) -> Result<f64, AeroError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(AeroError::InvalidInput(format!("efficiency {eta} outside (0, 1]")));
    }
    if !(arm_angle_deg.abs() < 90.0) {
        return Err(AeroError::InvalidInput(format!("arm angle {arm_angle_deg} deg not within (-90, 90)")));
    }
    Ok(thrust * eta * arm_angle_deg.to_radians().cos())
}

pub fn optimal_motor_station() -> f64 {
    OPTIMAL_MOTOR_STATION
}

/// Inputs of the efficiency surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCalibration {
    /// Efficiency lost per unit of chord the motor moves toward the root.
    pub drag_slope: f64,
    /// Station at which the tabulated efficiencies hold.
    pub table_station: f64,
    /// Optimum station at `reference_rpm`.
    pub optimum_station: f64,
    pub reference_rpm: f64,
    /// Tipward drift of the optimum per 1000 rpm.
    pub optimum_shift_per_krpm: f64,
    /// Domain over which outputs must stay in (0, 1].
    pub station_range: (f64, f64),
    pub rpm_range: (f64, f64),
}

impl Default for EfficiencyCalibration {
    fn default() -> Self {
        Self {
            drag_slope: 0.05,
            table_station: OPTIMAL_MOTOR_STATION,
            optimum_station: OPTIMAL_MOTOR_STATION,
            reference_rpm: NOMINAL_RPM,
            optimum_shift_per_krpm: 0.01,
            station_range: (0.3, 1.0),
            rpm_range: (3000.0, 6500.0),
        }
    }
}

/// Efficiency surface over (motor station, rpm).
///
/// `eta = eta_inf(rpm) - a (1 - x) + b(rpm) sqrt(1 - x)`: a linear drag loss
/// that grows toward the wide arm root, and a concave recirculation gain that
/// vanishes at the tip. `b` places the optimum at `x*(rpm)` and `eta_inf`
/// makes the surface pass through the table at `table_station`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyModel {
    table: EfficiencyTable,
    calibration: EfficiencyCalibration,
}

impl EfficiencyModel {
    pub fn calibrate(table: EfficiencyTable, calibration: EfficiencyCalibration) -> Result<Self, AeroError> {
        let c = calibration;
        let fail = |m: String| Err(AeroError::CalibrationFailure(m));
        if !(c.drag_slope > 0.0 && c.drag_slope.is_finite()) {
            return fail(format!("drag slope {} must be > 0", c.drag_slope));
        }
        let (x_lo, x_hi) = c.station_range;
        let (r_lo, r_hi) = c.rpm_range;
        if !(0.0 < x_lo && x_lo < x_hi && x_hi <= 1.0 && 0.0 < r_lo && r_lo < r_hi) {
            return fail("calibration domain is empty or out of range".into());
        }
        if !(c.table_station > 0.0 && c.table_station < 1.0) {
            return fail(format!("table station {} outside (0, 1)", c.table_station));
        }
        let model = Self { table, calibration };

        let mut rpms: Vec<f64> = (0..=70).map(|k| r_lo + (r_hi - r_lo) * k as f64 / 70.0).collect();
        rpms.extend(model.table.rows().iter().map(|r| r.0).filter(|r| *r >= r_lo && *r <= r_hi));
        for rpm in rpms {
            let x_opt = model.optimum_station(rpm);
            if !(x_opt > 0.0 && x_opt < 1.0) {
                return fail(format!("optimum station {x_opt} at {rpm} rpm outside (0, 1)"));
            }
            let peak = model.surface(x_opt.clamp(x_lo, x_hi), rpm);
            let low = model.surface(x_lo, rpm).min(model.surface(x_hi, rpm));
            if !(peak <= 1.0 && low > 0.0) {
                return fail(format!("efficiency leaves (0, 1] at {rpm} rpm ({low}..{peak})"));
            }
        }
        Ok(model)
    }

    pub fn paper() -> Self {
        Self::calibrate(EfficiencyTable::paper(), EfficiencyCalibration::default()).expect("default calibration")
    }

    pub fn table(&self) -> &EfficiencyTable {
        &self.table
    }

    pub fn calibration(&self) -> &EfficiencyCalibration {
        &self.calibration
    }

    /// Station of maximum efficiency at `rpm`.
    pub fn optimum_station(&self, rpm: f64) -> f64 {
        let c = &self.calibration;
        c.optimum_station + c.optimum_shift_per_krpm * (rpm - c.reference_rpm) / 1000.0
    }

    fn recirculation_gain(&self, rpm: f64) -> f64 {
        2.0 * self.calibration.drag_slope * (1.0 - self.optimum_station(rpm)).sqrt()
    }

    fn interaction(&self, x_c: f64, rpm: f64) -> f64 {
        let gap = 1.0 - x_c;
        -self.calibration.drag_slope * gap + self.recirculation_gain(rpm) * gap.sqrt()
    }

    fn surface(&self, x_c: f64, rpm: f64) -> f64 {
        let c = &self.calibration;
        let base = self.table.lookup(rpm) - self.interaction(c.table_station, rpm);
        base + self.interaction(x_c, rpm)
    }

    pub fn eval(&self, x_c: f64, rpm: f64) -> Result<f64, AeroError> {
        if !(x_c > 0.0 && x_c <= 1.0) {
            return Err(AeroError::InvalidInput(format!("motor station {x_c} outside (0, 1]")));
        }
        if !(rpm > 0.0 && rpm.is_finite()) {
            return Err(AeroError::InvalidInput(format!("rpm {rpm} must be > 0")));
        }
        Ok(self.surface(x_c, rpm))
    }
}

pub fn efficiency_model(x_c: f64, rpm: f64, model: &EfficiencyModel) -> Result<f64, AeroError> {
    model.eval(x_c, rpm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thrust_law() {
        let m = PropellerModel::nominal();
        assert_eq!(thrust_from_rpm(&m, 0.0), 0.0);
        assert!((m.thrust_coefficient - 3.065625e-7).abs() < 1e-18);
        assert!((thrust_from_rpm(&m, 4000.0) - 4.905).abs() < 1e-12);
        assert!((thrust_from_rpm(&m, 6000.0) - 11.03625).abs() < 1e-12);
        assert!((m.rpm_for_thrust(4.905) - 4000.0).abs() < 1e-9);
    }

    #[test]
    fn lookup_rows_and_interpolation() {
        let t = EfficiencyTable::paper();
        assert_eq!(efficiency_lookup(&t, 4000.0), 0.895);
        assert_eq!(efficiency_lookup(&t, 5000.0), 0.909);
        assert_eq!(efficiency_lookup(&t, 6000.0), 0.916);
        assert!((efficiency_lookup(&t, 4500.0) - 0.902).abs() < 1e-12);
        assert_eq!(efficiency_lookup(&t, 1000.0), 0.895);
        assert_eq!(efficiency_lookup(&t, 9000.0), 0.916);
    }

    #[test]
    fn table_validation() {
        assert_eq!(EfficiencyTable::new(vec![]), Err(AeroError::EmptyTable));
        assert!(EfficiencyTable::new(vec![(2.0, 0.9), (1.0, 0.9)]).is_err());
        assert!(EfficiencyTable::new(vec![(1.0, 1.2)]).is_err());
        assert!(EfficiencyTable::new(vec![(1.0, 0.0)]).is_err());
        let single = EfficiencyTable::new(vec![(1000.0, 0.8)]).unwrap();
        assert_eq!(single.lookup(5.0), 0.8);
    }

    #[test]
    fn vertical_projection() {
        assert_eq!(net_vertical_thrust(4.905, 0.0, 0.895).unwrap(), 4.905 * 0.895);
        let v = net_vertical_thrust(4.905, 20.0, 0.895).unwrap();
        assert!((v - 4.905 * 0.895 * 20f64.to_radians().cos()).abs() < 1e-12);
        assert!((v - 4.125).abs() < 5e-4);
        assert!(net_vertical_thrust(1.0, 90.0, 0.9).is_err());
        assert!(net_vertical_thrust(1.0, 0.0, 1.1).is_err());
    }

    #[test]
    fn optimum_constant() {
        assert_eq!(optimal_motor_station(), 0.83);
    }

    #[test]
    fn surrogate_matches_table_at_design_station() {
        let m = EfficiencyModel::paper();
        for (rpm, eta) in TABLE_EFFICIENCY {
            assert!((m.eval(0.83, rpm).unwrap() - eta).abs() < 1e-9);
        }
    }

    #[test]
    fn surrogate_optimum_is_interior() {
        let m = EfficiencyModel::paper();
        let grid: Vec<f64> = (300..=1000).map(|k| k as f64 / 1000.0).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| m.eval(*a, 4000.0).unwrap().total_cmp(&m.eval(*b, 4000.0).unwrap()))
            .unwrap();
        assert!((best - 0.83).abs() <= 0.02, "{best}");
        for rpm in [3000.0, 4000.0, 5000.0, 6000.0, 6500.0] {
            assert!(m.eval(1.0, rpm).unwrap() < m.eval(0.83, rpm).unwrap());
        }
        // optimum drifts tipward with speed
        assert!(m.optimum_station(6000.0) > m.optimum_station(4000.0));
    }

    #[test]
    fn calibration_failures() {
        let bad = EfficiencyCalibration { drag_slope: -1.0, ..Default::default() };
        assert!(matches!(
            EfficiencyModel::calibrate(EfficiencyTable::paper(), bad),
            Err(AeroError::CalibrationFailure(_))
        ));
        let drift = EfficiencyCalibration { optimum_shift_per_krpm: 0.2, ..Default::default() };
        assert!(EfficiencyModel::calibrate(EfficiencyTable::paper(), drift).is_err());
        let steep = EfficiencyCalibration { drag_slope: 5.0, ..Default::default() };
        assert!(EfficiencyModel::calibrate(EfficiencyTable::paper(), steep).is_err());
    }

    #[test]
    fn surrogate_input_validation() {
        let m = EfficiencyModel::paper();
        assert!(m.eval(0.0, 4000.0).is_err());
        assert!(m.eval(1.2, 4000.0).is_err());
        assert!(m.eval(0.5, 0.0).is_err());
    }
}
