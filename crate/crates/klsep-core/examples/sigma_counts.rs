//! Quick driver: print (undefined, non-separated, sigma) counts for the
//! specs named on the command line, e.g. `sigma_counts B4 D5 F4 A6`.

use klsep_core::{build_group, compute_fw, kl_basis, build_wgraph, CoxeterSpec};

fn main() {
    for arg in std::env::args().skip(1) {
        let spec = match arg.split_at(1) {
            ("A", r) => CoxeterSpec::a(r.parse().unwrap()),
            ("B", r) => CoxeterSpec::b(r.parse().unwrap()),
            ("D", r) => CoxeterSpec::d(r.parse().unwrap()),
            ("F", _) => CoxeterSpec::f4(),
            ("G", _) => CoxeterSpec::g2(),
            _ => panic!("unknown spec {arg}"),
        };
        let t0 = std::time::Instant::now();
        let g = build_group(spec).unwrap();
        let t = kl_basis(&g);
        let wg = build_wgraph(&g, &t);
        let f = compute_fw(&g, &wg);
        let undef = g.elements().filter(|&x| !f.is_defined(x)).count();
        let nonsep = g
            .elements()
            .filter(|&x| f.is_defined(x) && !f.is_separated(x))
            .count();
        println!(
            "{}: order={} undefined={} nonSeparated={} sigma={} ({:.1?})",
            arg,
            g.size(),
            undef,
            nonsep,
            f.sigma().len(),
            t0.elapsed()
        );
    }
}
