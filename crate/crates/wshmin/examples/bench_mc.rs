use std::time::Instant;
use wshmin::montecarlo::SamplerConfig;

fn main() {
    let cfg = SamplerConfig { n: 50, m: 50, n_samples: 2000, seed: 1, n_streams: 1 };
    let t0 = Instant::now();
    let s = wshmin::montecarlo::draw_samples(&cfg).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    println!("total: {:.1} us/sample (sum {:.6})", dt / s.len() as f64 * 1e6, s.iter().sum::<f64>());

    let (fill, bidiag, bisect) = wshmin::montecarlo::profile_phases(&cfg).unwrap();
    println!("fill {:.1} us  bidiag {:.1} us  bisect {:.1} us", fill * 1e6, bidiag * 1e6, bisect * 1e6);
}
