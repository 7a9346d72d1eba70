//! Content-addressed chart cache: a cold run computes, a warm run reads.

use plcob::cache::Cache;
use plcob::cli::{cmd_resolve, Builtin, ChartRequest, Format};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let req = ChartRequest::builtin(Builtin::Cpl);
    let cold = cmd_resolve(&req, Format::Json, Some(&cache)).unwrap();
    let warm = cmd_resolve(&req, Format::Json, Some(&cache)).unwrap();
    println!("cold hit {}, warm hit {}", cold.cache_hit, warm.cache_hit);
    println!("identical output: {}", cold.rendered == warm.rendered);
    let report = cache.gc().unwrap();
    println!("gc kept {}, removed {}", report.kept, report.removed());
    println!("clear removed {}", cache.clear().unwrap());
}
