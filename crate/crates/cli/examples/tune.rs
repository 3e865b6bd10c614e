// Scratch parameter sweep for the end-to-end trend experiment (removed
// before release).

use aircomp::pool::ThreadPoolExecutor;
use aircomp_core::channel::{FadingModel, NoiseParams};
use aircomp_core::learning::{
    init_model, make_synthetic, partition, stratified_split, train, Aggregation, Architecture,
    PartitionSpec, TrainConfig,
};
use aircomp_core::rng::{Purpose, SeedTree};
use aircomp_core::topology::{
    build_hex_grid, compute_link_gains, place_cell_edge_eds, PathLossParams, PlacementMode,
};

fn run_once(
    seed: u64,
    dims: usize,
    separation: f64,
    hetero: bool,
    aggregation: Aggregation,
    rounds: usize,
    alpha: f64,
    vertices: bool,
    isd: f64,
) -> (f64, f64) {
    let dep = build_hex_grid(7, isd).unwrap();
    let mode = if vertices { PlacementMode::VerticesOnly } else { PlacementMode::UniformEdge };
    let dep = place_cell_edge_eds(&dep, 12, mode, seed).unwrap();
    let r = 25.0 / (std::f64::consts::PI / 6.0).cos();
    let plp = PathLossParams { alpha, r_ul: r, r_dl: r };
    let gains = compute_link_gains(&dep, &plp).unwrap();
    let classes = 4;
    let per_class_train = 500;
    let per_class_test = 100;
    let all = make_synthetic(classes, dims, per_class_train + per_class_test, separation, seed).unwrap();
    let frac = per_class_test as f64 / (per_class_train + per_class_test) as f64;
    let (pool, test) = stratified_split(&all, frac, seed).unwrap();
    let band_count: usize = std::env::var("BANDS").ok().and_then(|s| s.parse().ok()).unwrap_or(3);
    let spec = if hetero { PartitionSpec::heterogeneous(band_count) } else { PartitionSpec::homogeneous() };
    let datasets = partition(&pool, &dep, &spec, seed).unwrap();
    let arch = Architecture::Logistic { input_dim: dims, classes };
    let tree = SeedTree::new(seed);
    let model = init_model(arch, 0.01, &mut tree.stream(Purpose::ModelInit, &[0]));
    let models = vec![model; 12];
    let cfg = TrainConfig {
        eta: 0.01,
        batch_size: 16,
        rounds,
        seed,
        aggregation,
        genie: false,
        fading: FadingModel::flat_iid(),
        noise: NoiseParams { sigma2_es: 0.01, sigma2_ed: 0.01 },
        symbol_energy: 2.0,
        subcarriers: 1200,
        mapping_seed: None,
        record_votes: false,
    };
    let exec = ThreadPoolExecutor::new(2);
    let log = train(&cfg, &gains, &datasets, models, &test, &exec).unwrap();
    let last: Vec<_> = log.metrics.iter().filter(|m| m.round == rounds - 1).collect();
    let acc_all = last.iter().map(|m| m.acc_all).sum::<f64>() / last.len() as f64;
    let acc_pers = last.iter().map(|m| m.acc_personalized).sum::<f64>() / last.len() as f64;
    (acc_all, acc_pers)
}

fn run_diag(seed: u64, dims: usize, separation: f64, aggregation: Aggregation, genie: bool, rounds: usize) -> (f64, f64) {
    let dep = build_hex_grid(7, 50.0).unwrap();
    let dep = place_cell_edge_eds(&dep, 12, PlacementMode::UniformEdge, seed).unwrap();
    let r = 25.0 / (std::f64::consts::PI / 6.0).cos();
    let plp = PathLossParams { alpha: 4.0, r_ul: r, r_dl: r };
    let gains = if genie {
        // indicator gains from the default threshold
        let g = compute_link_gains(&dep, &plp).unwrap();
        let thr = aircomp_core::topology::default_connectivity_threshold(&dep, &plp);
        aircomp_core::topology::LinkGains {
            ul: g.ul.iter().map(|row| row.iter().map(|&x| if x >= thr {1.0} else {0.0}).collect()).collect(),
            dl: g.dl.iter().map(|row| row.iter().map(|&x| if x >= thr {1.0} else {0.0}).collect()).collect(),
        }
    } else {
        compute_link_gains(&dep, &plp).unwrap()
    };
    let classes = 4;
    let all = make_synthetic(classes, dims, 600, separation, seed).unwrap();
    let (pool, test) = stratified_split(&all, 100.0/600.0, seed).unwrap();
    let datasets = partition(&pool, &dep, &PartitionSpec::homogeneous(), seed).unwrap();
    let arch = Architecture::Logistic { input_dim: dims, classes };
    let tree = SeedTree::new(seed);
    let model = init_model(arch, 0.01, &mut tree.stream(Purpose::ModelInit, &[0]));
    let cfg = TrainConfig {
        eta: 0.01, batch_size: 16, rounds, seed, aggregation, genie,
        fading: FadingModel::flat_iid(),
        noise: NoiseParams { sigma2_es: 0.01, sigma2_ed: 0.01 },
        symbol_energy: 2.0, subcarriers: 1200, mapping_seed: None, record_votes: false,
    };
    let exec = ThreadPoolExecutor::new(2);
    let log = train(&cfg, &gains, &datasets, vec![model; 12], &test, &exec).unwrap();
    let last: Vec<_> = log.metrics.iter().filter(|m| m.round == rounds - 1).collect();
    let acc = last.iter().map(|m| m.acc_all).sum::<f64>() / last.len() as f64;
    let flip = log.metrics.iter().filter(|m| m.round >= rounds/2).map(|m| m.mv_flip_fraction).sum::<f64>()
        / log.metrics.iter().filter(|m| m.round >= rounds/2).count() as f64;
    (acc, flip)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args[1] == "diag" {
        let dims = 16usize; let separation: f64 = args[2].parse().unwrap();
        let rounds: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(200);
        for (name, agg, genie) in [
            ("multi-genie ", Aggregation::MultiCell, true),
            ("multi-phys  ", Aggregation::MultiCell, false),
            ("single-phys ", Aggregation::SingleCell, false),
            ("local-only  ", Aggregation::LocalOnly, false),
        ] {
            let mut acc = 0.0; let mut flip = 0.0;
            for &s in &[101u64, 202, 303] {
                let (a, f) = run_diag(s, dims, separation, agg, genie, rounds);
                acc += a / 3.0; flip += f / 3.0;
            }
            println!("  {name} acc={acc:.4} own-sign-flip={flip:.3}");
        }
        return;
    }
    let dims: usize = args[1].parse().unwrap();
    let separation: f64 = args[2].parse().unwrap();
    let rounds: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(200);
    let alpha: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(4.0);
    let vertices: bool = args.get(5).map(|s| s == "v").unwrap_or(false);
    let isd: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(50.0);
    let seeds = [101u64, 202, 303, 404, 505];

    let mean =
        |f: &dyn Fn(u64) -> (f64, f64)| -> (f64, f64) {
            let mut a = 0.0;
            let mut p = 0.0;
            for &s in &seeds {
                let (x, y) = f(s);
                a += x;
                p += y;
            }
            (a / seeds.len() as f64, p / seeds.len() as f64)
        };

    let (mc_homog, _) = mean(&|s| run_once(s, dims, separation, false, Aggregation::MultiCell, rounds, alpha, vertices, isd));
    let (sc_homog, _) = mean(&|s| run_once(s, dims, separation, false, Aggregation::SingleCell, rounds, alpha, vertices, isd));
    let (mc_het_all, mc_het_pers) = mean(&|s| run_once(s, dims, separation, true, Aggregation::MultiCell, rounds, alpha, vertices, isd));
    let (sc_het_all, sc_het_pers) = mean(&|s| run_once(s, dims, separation, true, Aggregation::SingleCell, rounds, alpha, vertices, isd));
    let (_, local_het_pers) = mean(&|s| run_once(s, dims, separation, true, Aggregation::LocalOnly, rounds, alpha, vertices, isd));

    println!("dims={dims} sep={separation} T={rounds} alpha={alpha} vertices={vertices} isd={isd}");
    println!("  homog:  multi={mc_homog:.4} single={sc_homog:.4}  gap={:.1} pts", (mc_homog - sc_homog) * 100.0);
    println!("  hetero: multi_all={mc_het_all:.4} single_all={sc_het_all:.4}  gap={:.1} pts", (mc_het_all - sc_het_all) * 100.0);
    println!("  hetero personalized: multi={mc_het_pers:.4} single={sc_het_pers:.4} local={local_het_pers:.4}  multi-local={:.1} pts", (mc_het_pers - local_het_pers) * 100.0);
}
