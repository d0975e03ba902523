use fracwave::harness::{run_convergence, ExampleId, ExperimentConfig};
use fracwave::Scheme;

fn main() {
    for m in [600usize, 2000, 5000] {
        let report = run_convergence(&ExperimentConfig {
            example: ExampleId::Ex52,
            scheme: Scheme::H3n3GradedFast,
            alphas: vec![1.3],
            n_list: vec![32, 64, 128, 256],
            m_list: vec![m],
            grading: 3.0,
            soe_eps: 1e-12,
            out: None,
        }).unwrap();
        println!("M={m}");
        print!("{}", report.render_table());
    }
}
