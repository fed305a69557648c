//! Word lengths in the shuffler: exact lengths from a breadth-first ball against
//! the constructive words built for transpositions and whole elements.

use halolab::group::{l1_norm, Zd};
use halolab::word::{bfs_ball, transposition_word_len, WordBuilder, DEFAULT_BALL_CAP};
use halolab::Halo;

fn main() {
    let sh = Halo::shuffler(Zd::new(1));
    let ball = bfs_ball(&sh, 6, DEFAULT_BALL_CAP).unwrap();
    println!("ball of radius {}: sphere sizes {:?}", ball.radius, ball.sphere_sizes);

    let wb = WordBuilder::new(sh.clone());
    for k in 1..=4i64 {
        let g = vec![k];
        let w = wb.transposition_word(&g, 1, 1).unwrap();
        let tau = sh.lamp_only(sh.transposition(&vec![0], 1, &g, 1));
        let exact = ball.length(&tau).map_or("> 6".to_string(), |l| l.to_string());
        println!(
            "swap 0<->{k}: constructive {} (formula {}), exact {exact}, bound 4|g| = {}",
            w.len(),
            transposition_word_len(l1_norm(&g), true),
            4 * l1_norm(&g)
        );
    }
}
