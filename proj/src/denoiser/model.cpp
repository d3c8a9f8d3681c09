// SPDX-License-Identifier: Apache-2.0

#include "midi/denoiser/model.hpp"

#include <cmath>
#include <stdexcept>

namespace midi::denoiser {

using namespace midi::numkit;

void DenoiserConfig::validate() const {
  if (n_layers < 1) throw std::invalid_argument("n_layers must be >= 1");
  if (node_dim < 1 || edge_dim < 1 || global_dim < 1 || pos_hidden < 1) {
    throw std::invalid_argument("feature dims must be positive");
  }
  if (n_heads < 1 || node_dim % n_heads != 0) {
    throw std::invalid_argument("n_heads must divide node_dim");
  }
  if (t_emb_dim < 2 || t_emb_dim % 2 != 0) {
    throw std::invalid_argument("t_emb_dim must be positive and even");
  }
  if (max_timestep < 1) throw std::invalid_argument("max_timestep must be >= 1");
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
}

Denoiser::Denoiser(const DenoiserConfig& cfg, int n_atom_types,
                   int n_charge_types, int n_bond_types, uint64_t init_seed)
    : cfg_(cfg),
      n_atom_types_(n_atom_types),
      n_charge_types_(n_charge_types),
      n_bond_types_(n_bond_types),
      params_(init_seed) {
  cfg_.validate();
  if (n_atom_types < 1 || n_charge_types < 1 || n_bond_types < 1) {
    throw std::invalid_argument("alphabet sizes must be positive");
  }
  const int dh = cfg_.node_dim, de = cfg_.edge_dim, dw = cfg_.global_dim;
  const int dd = 4;  // pair descriptor width

  embed_h_ = Linear(params_, "embed.h",
                    n_atom_types + n_charge_types + cfg_.t_emb_dim, dh);
  embed_e_ = Linear(params_, "embed.e", n_bond_types, de);
  // Pooled one-hot means, a node-count scalar, and the timestep embedding.
  embed_w_ = Linear(params_, "embed.w",
                    n_atom_types + n_charge_types + n_bond_types + 1 +
                        cfg_.t_emb_dim,
                    dw);

  blocks_.reserve(static_cast<size_t>(cfg_.n_layers));
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    Block b;
    b.ln_e = LayerNorm(params_, p + "edge.ln", de);
    b.edge_mlp = Mlp(params_, p + "edge.mlp", {de + 2 * dh + dd + dw, 2 * de, de},
                     /*zero_init_last=*/true);

    b.ln_h = LayerNorm(params_, p + "attn.ln", dh);
    b.attn_q = Linear(params_, p + "attn.q", dh, dh);
    b.attn_k = Linear(params_, p + "attn.k", dh, dh);
    b.attn_v = Linear(params_, p + "attn.v", dh, dh);
    b.edge_bias = Linear(params_, p + "attn.edge_bias", de, cfg_.n_heads);
    b.desc_bias = Linear(params_, p + "attn.desc_bias", dd, cfg_.n_heads);
    b.pna_edge = PnaPool(params_, p + "attn.pna_edge", de, dh);
    b.pna_desc = PnaPool(params_, p + "attn.pna_desc", dd, dh);
    b.film = Linear(params_, p + "attn.film", 2 * dh + dw, 2 * dh);
    b.attn_out = Linear(params_, p + "attn.out", dh, dh, /*zero_init=*/true);

    b.ln_w = LayerNorm(params_, p + "global.ln", dw);
    b.global_mlp = Mlp(params_, p + "global.mlp", {dw + dh + de, 2 * dw, dw},
                       /*zero_init_last=*/true);

    b.phi_mlp = Mlp(params_, p + "coord.phi", {2 * dh + dd + de, dh, 1},
                    /*zero_init_last=*/true);
    b.coord_gamma = params_.add_constant(p + "coord.gamma", {1}, 1.0);

    b.ln_h_ff = LayerNorm(params_, p + "node_ff.ln", dh);
    b.node_ff = Mlp(params_, p + "node_ff.mlp", {dh, 2 * dh, dh},
                    /*zero_init_last=*/true);
    b.ln_e_ff = LayerNorm(params_, p + "edge_ff.ln", de);
    b.edge_ff = Mlp(params_, p + "edge_ff.mlp", {de, 2 * de, de},
                    /*zero_init_last=*/true);
    b.pos_mlp = PosMlp(params_, p + "pos_ff", cfg_.pos_hidden);
    b.ff_gamma = params_.add_constant(p + "pos_ff.gamma", {1}, 1.0);

    blocks_.push_back(std::move(b));
  }

  final_ln_h_ = LayerNorm(params_, "head.ln_h", dh);
  final_ln_e_ = LayerNorm(params_, "head.ln_e", de);
  dec_x_ = Linear(params_, "head.x", dh, n_atom_types);
  dec_c_ = Linear(params_, "head.c", dh, n_charge_types);
  dec_y_ = Linear(params_, "head.y", de, n_bond_types);
  head_phi_ = Mlp(params_, "head.phi", {2 * dh + dd + de, dh, 1},
                  /*zero_init_last=*/true);
  head_gamma_ = params_.add_constant("head.gamma", {1}, 1.0);
}

namespace {

// Sum over j of phi(i,j) * (rn_j - rn_i), added to R and re-centered.
Tensor equivariant_update(const Tensor& R, const Tensor& Rn, const Tensor& phi,
                          const std::vector<int64_t>& rows_i,
                          const std::vector<int64_t>& rows_j, int n) {
  Tensor rni = permute_rows(Rn, rows_i);
  Tensor rnj = permute_rows(Rn, rows_j);
  Tensor contrib = reshape(phi * (rnj - rni), {n, n, 3});
  return com_project_t(R + sum(contrib, 1));
}

}  // namespace

DenoiserOutput Denoiser::forward(const moldata::OneHotGraph& g, int t) const {
  if (t < 0 || t > cfg_.max_timestep) {
    throw std::invalid_argument("timestep " + std::to_string(t) +
                                " outside [0, " +
                                std::to_string(cfg_.max_timestep) + "]");
  }
  const int n = g.n();
  if (n < 1) throw std::invalid_argument("graph has no atoms");
  if (g.X.dim(1) != n_atom_types_ || g.C.dim(1) != n_charge_types_ ||
      g.Y.dim(2) != n_bond_types_) {
    throw std::invalid_argument("graph alphabet does not match the model");
  }
  const int dh = cfg_.node_dim, de = cfg_.edge_dim, dw = cfg_.global_dim;
  const int heads = cfg_.n_heads, dk = dh / heads;
  const double delta = cfg_.delta;
  const auto rows_i = pair_rows_i(n);
  const auto rows_j = pair_rows_j(n);

  auto probe = [&](const std::string& label, const Tensor& R) {
    if (coord_probe) coord_probe(label, R);
  };

  // Input embeddings.
  Tensor temb = timestep_embedding(t, cfg_.t_emb_dim);
  Tensor temb_nodes = broadcast_to(temb, {n, cfg_.t_emb_dim});
  Tensor h = embed_h_(concat({g.X, g.C, temb_nodes}, 1));
  Tensor y_flat = reshape(g.Y, {n * n, n_bond_types_});
  Tensor e = embed_e_(y_flat);
  Tensor n_scalar = Tensor::from_data({1, 1}, {double(n) / 32.0});
  Tensor w = embed_w_(concat({mean(g.X, 0, true), mean(g.C, 0, true),
                              mean(y_flat, 0, true), n_scalar, temb},
                             1));
  Tensor R = com_project_t(g.R);
  probe("input", R);

  for (size_t l = 0; l < blocks_.size(); ++l) {
    const Block& b = blocks_[l];
    const std::string tag = "block" + std::to_string(l);
    Tensor desc = pair_descriptors(R, delta);
    Tensor w_pairs = broadcast_to(w, {n * n, dw});
    Tensor w_nodes = broadcast_to(w, {n, dw});

    {  // (1) edge update from endpoints, pair descriptors, and the global.
      Tensor hi = permute_rows(h, rows_i);
      Tensor hj = permute_rows(h, rows_j);
      e = e + b.edge_mlp(concat({b.ln_e(e), hi, hj, desc, w_pairs}, 1));
    }

    {  // (2) node update: biased multi-head attention with FiLM output.
      Tensor hn = b.ln_h(h);
      Tensor qi = permute_rows(b.attn_q(hn), rows_i);
      Tensor kj = permute_rows(b.attn_k(hn), rows_j);
      Tensor dots = sum(reshape(qi * kj, {n * n, heads, dk}), 2);
      Tensor logits = dots / std::sqrt(double(dk)) + b.edge_bias(e) +
                      b.desc_bias(desc);
      Tensor attn = softmax(reshape(logits, {n, n, heads}), 1);
      Tensor vj = reshape(permute_rows(b.attn_v(hn), rows_j),
                          {n, n, heads, dk});
      Tensor ctx = reshape(sum(reshape(attn, {n, n, heads, 1}) * vj, 1),
                           {n, dh});
      Tensor mod = b.film(
          concat({b.pna_edge(e, n), b.pna_desc(desc, n), w_nodes}, 1));
      Tensor scale = slice(mod, 1, 0, dh);
      Tensor shift = slice(mod, 1, dh, 2 * dh);
      h = h + b.attn_out(ctx * (scale + 1.0) + shift);
    }

    {  // (3) global update from pooled node and edge features.
      w = w + b.global_mlp(concat({b.ln_w(w), mean(h, 0, true),
                                   mean(e, 0, true)},
                                  1));
    }

    {  // (4) equivariant coordinate update.
      Tensor hi = permute_rows(h, rows_i);
      Tensor hj = permute_rows(h, rows_j);
      Tensor phi = b.phi_mlp(concat({hi, hj, desc, e}, 1));
      Tensor Rn = e3norm(R, b.coord_gamma, delta);
      R = equivariant_update(R, Rn, phi, rows_i, rows_j, n);
      probe(tag + ".coord", R);
    }

    // Feed-forward sublayers.
    h = h + b.node_ff(b.ln_h_ff(h));
    e = e + b.edge_ff(b.ln_e_ff(e));
    R = com_project_t(R + b.pos_mlp(e3norm(R, b.ff_gamma, delta), delta));
    probe(tag + ".pos_ff", R);
  }

  // Decode heads.
  Tensor hf = final_ln_h_(h);
  Tensor ef = final_ln_e_(e);
  DenoiserOutput out;
  out.pX = softmax(dec_x_(hf), 1);
  out.pC = softmax(dec_c_(hf), 1);
  Tensor ly = dec_y_(ef);
  Tensor ly_sym = (ly + permute_rows(ly, pair_transpose(n))) * 0.5;
  out.pY = reshape(softmax(ly_sym, 1), {n, n, n_bond_types_});

  Tensor desc = pair_descriptors(R, delta);
  Tensor hfi = permute_rows(hf, rows_i);
  Tensor hfj = permute_rows(hf, rows_j);
  Tensor phi = head_phi_(concat({hfi, hfj, desc, ef}, 1));
  Tensor Rn = e3norm(R, head_gamma_, delta);
  out.R_hat = equivariant_update(R, Rn, phi, rows_i, rows_j, n);
  probe("head.coord", out.R_hat);
  return out;
}

}  // namespace midi::denoiser
