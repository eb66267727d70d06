//! Random valid plans with magnitudes close to the bundled case, for property
//! tests and benchmarks.

use rand::Rng;

use crate::model::{
    EconomicConstants, MachineSpec, MillingPlan, OperationKind, OperationSpec, ToolKind,
    ToolQuality, ToolSpec,
};

const KINDS: [OperationKind; 4] = [
    OperationKind::Face,
    OperationKind::Corner,
    OperationKind::Pocket,
    OperationKind::Slot,
];

/// A valid plan of `operations` operations, one dedicated tool each.
///
/// Face operations get a carbide face mill, the rest an HSS end mill. About a
/// third of the tools carry a permitted force and a fifth of the operations
/// have no finish requirement.
pub fn random_plan<R: Rng + ?Sized>(rng: &mut R, operations: usize) -> MillingPlan {
    let economics = EconomicConstants {
        sale_price: rng.random_range(20.0..60.0),
        material_cost: rng.random_range(0.1..2.0),
        labor_rate: rng.random_range(0.2..1.0),
        overhead_rate: rng.random_range(0.5..2.0),
        setup_time: rng.random_range(0.5..3.0),
    };
    let machine = MachineSpec {
        motor_power: rng.random_range(6.0..15.0),
        efficiency: rng.random_range(0.8..0.98),
        power_constant: rng.random_range(1.5..3.0),
        wear_factor: rng.random_range(1.0..1.3),
        chip_area_exponent: rng.random_range(0.2..0.35),
        slenderness_exponent: rng.random_range(0.1..0.2),
    };

    let mut tools = Vec::with_capacity(operations);
    let mut ops = Vec::with_capacity(operations);
    for i in 0..operations {
        let id = i as u32 + 1;
        let kind = KINDS[rng.random_range(0..KINDS.len())];
        let tool = if kind == OperationKind::Face {
            ToolSpec {
                id,
                kind: ToolKind::FaceMill,
                quality: ToolQuality::Carbide,
                diameter: rng.random_range(40.0..80.0),
                teeth: rng.random_range(4..=8),
                price: rng.random_range(30.0..70.0),
                lead_angle: rng.random_range(30.0..60.0),
                clearance_angle: rng.random_range(3.0..10.0),
                taylor_constant: rng.random_range(80.0..120.0),
                life_exponent: rng.random_range(0.25..0.35),
                permitted_force: None,
                change_time: rng.random_range(0.2..1.0),
            }
        } else {
            ToolSpec {
                id,
                kind: ToolKind::EndMill,
                quality: ToolQuality::Hss,
                diameter: rng.random_range(8.0..20.0),
                teeth: rng.random_range(2..=6),
                price: rng.random_range(5.0..15.0),
                lead_angle: 0.0,
                clearance_angle: rng.random_range(3.0..10.0),
                taylor_constant: rng.random_range(25.0..45.0),
                life_exponent: rng.random_range(0.12..0.2),
                permitted_force: None,
                change_time: rng.random_range(0.2..1.0),
            }
        };
        let tool = ToolSpec {
            permitted_force: rng
                .random_bool(1.0 / 3.0)
                .then(|| rng.random_range(3_000.0..20_000.0)),
            ..tool
        };
        let axial_depth = rng.random_range(2.0..10.0);
        let radial_depth = if kind == OperationKind::Face {
            tool.diameter
        } else {
            rng.random_range(0.3..1.0) * tool.diameter
        };
        ops.push(OperationSpec {
            number: id,
            kind,
            tool: id,
            axial_depth,
            radial_depth,
            radial_depth_assumed: false,
            travel: rng.random_range(30.0..500.0),
            surface_finish: (!rng.random_bool(0.2)).then(|| rng.random_range(1.0..8.0)),
            speed_bounds: kind.default_speed_bounds(),
            feed_bounds: kind.default_feed_bounds(),
            k3_override: None,
        });
        tools.push(tool);
    }

    MillingPlan {
        economics,
        machine,
        tools,
        operations: ops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_plans_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=6 {
            for _ in 0..50 {
                let plan = random_plan(&mut rng, m);
                plan.validate().unwrap();
                assert_eq!(plan.len(), m);
            }
        }
    }
}
