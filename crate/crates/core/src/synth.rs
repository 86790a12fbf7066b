//! Cone-degenerate synthetic retrieval datasets.
//!
//! Latent items are `normalize(axis + spread * z)` around one random unit
//! axis; smaller spreads pack the set into a narrower cone. Gallery rows are
//! the latents themselves and each matched query is
//! `normalize(latent + query_noise * z')`. The reference sets are an
//! independent draw of gallery/query pairs from the same law.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embio::{EmbeddingSet, RelevanceMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeConfig {
    /// Number of paired gallery/query items.
    pub n_items: usize,
    /// Size of each reference set.
    pub n_ref: usize,
    pub dim: usize,
    /// Std of the isotropic perturbation around the axis.
    pub cone_spread: f64,
    /// Std of the perturbation between an item and its query.
    pub query_noise: f64,
    pub seed: u64,
}

impl Default for ConeConfig {
    fn default() -> Self {
        ConeConfig {
            n_items: 200,
            n_ref: 1000,
            dim: 32,
            cone_spread: 0.15,
            query_noise: 0.1,
            seed: 7,
        }
    }
}

impl ConeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_items < 2 || self.n_ref < 2 || self.dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "items ({}), refs ({}) and dim ({}) must all be >= 2",
                self.n_items, self.n_ref, self.dim
            )));
        }
        if !(self.cone_spread.is_finite() && self.cone_spread > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cone spread {} must be > 0",
                self.cone_spread
            )));
        }
        if !(self.query_noise.is_finite() && self.query_noise >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "query noise {} must be >= 0",
                self.query_noise
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeDataset {
    pub gallery: EmbeddingSet,
    pub query: EmbeddingSet,
    pub ref_gallery: EmbeddingSet,
    pub ref_query: EmbeddingSet,
    /// `q{i}` to `g{i}`.
    pub relevance: RelevanceMap,
    /// `rq{j}` to `rg{j}`.
    pub ref_relevance: RelevanceMap,
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    axis: Vec<f64>,
    cfg: &'a ConeConfig,
}

impl Sampler<'_> {
    fn gaussian(&mut self) -> Vec<f64> {
        (0..self.cfg.dim)
            .map(|_| StandardNormal.sample(&mut self.rng))
            .collect()
    }

    fn perturbed(&mut self, center: &[f64], scale: f64) -> Vec<f64> {
        let z = self.gaussian();
        normalized(center.iter().zip(z).map(|(c, z)| c + scale * z).collect())
    }

    /// One (gallery, query) pair.
    fn pair(&mut self) -> (Vec<f64>, Vec<f64>) {
        let axis = self.axis.clone();
        let latent = self.perturbed(&axis, self.cfg.cone_spread);
        let query = self.perturbed(&latent, self.cfg.query_noise);
        (latent, query)
    }

    fn pairs(
        &mut self,
        n: usize,
        g_prefix: &str,
        q_prefix: &str,
    ) -> Result<(EmbeddingSet, EmbeddingSet, RelevanceMap)> {
        let (mut g, mut q) = (
            Vec::with_capacity(n * self.cfg.dim),
            Vec::with_capacity(n * self.cfg.dim),
        );
        for _ in 0..n {
            let (a, b) = self.pair();
            g.extend(a);
            q.extend(b);
        }
        let g_ids: Vec<String> = (0..n).map(|i| format!("{g_prefix}{i}")).collect();
        let q_ids: Vec<String> = (0..n).map(|i| format!("{q_prefix}{i}")).collect();
        let g = EmbeddingSet::new(g_ids, g, self.cfg.dim)?;
        let q = EmbeddingSet::new(q_ids, q, self.cfg.dim)?;
        let rel = RelevanceMap::diagonal(&q, &g);
        Ok((g, q, rel))
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn generate_cone_dataset(cfg: &ConeConfig) -> Result<ConeDataset> {
    cfg.validate()?;
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        axis: Vec::new(),
        cfg,
    };
    sampler.axis = normalized(sampler.gaussian());
    let (gallery, query, relevance) = sampler.pairs(cfg.n_items, "g", "q")?;
    let (ref_gallery, ref_query, ref_relevance) = sampler.pairs(cfg.n_ref, "rg", "rq")?;
    Ok(ConeDataset {
        gallery,
        query,
        ref_gallery,
        ref_query,
        relevance,
        ref_relevance,
    })
}
