//! Fast numeric agreement checks for every built-in scheme/region pair.
//! The full-resolution sweep lives in the acceptance suite; this keeps the
//! dev loop honest with fewer samples and a coarser raster.

use secrecy_regions::algebra::equiv::{equiv_check, EquivOptions, Verdict};
use secrecy_regions::algebra::fm::{eliminate, verify_certificates, FmOptions};
use secrecy_regions::algebra::presets::{fm_pairs, preset};
use secrecy_regions::algebra::RateVar;

#[test]
fn every_scheme_projects_onto_its_region() {
    for (scheme_id, region_id, order) in fm_pairs() {
        let scheme = preset(scheme_id).unwrap();
        let region = preset(region_id).unwrap();
        let order: Vec<RateVar> = order.iter().map(|v| RateVar::new(v)).collect();
        let out = eliminate(&scheme, &order, &FmOptions::default()).unwrap();
        verify_certificates(&out).unwrap();
        assert!(out.system.bound.is_empty(), "{scheme_id}: variables left over");

        let opts = EquivOptions {
            binary_samples: 4,
            ternary_samples: 1,
            grid: 200,
            ..EquivOptions::default()
        };
        let report = equiv_check(&out.system, &region, &opts).unwrap();
        assert!(
            matches!(report.verdict, Verdict::Pass),
            "{scheme_id} vs {region_id}: {report:?}"
        );
    }
}
