// SPDX-License-Identifier: Apache-2.0
//
// Graph-transformer denoiser over noisy molecular graphs. Each update block
// refreshes, in order: (1) edge features from their endpoints and pair
// descriptors, (2) node features by multi-head attention whose logits carry
// additive biases from edge features and pair descriptors and whose output
// is feature-wise modulated by pooled edge statistics and the global
// feature, (3) the global feature from pooled node/edge features, and
// (4) coordinates by an equivariant update that moves each atom along
// difference vectors weighted by learned invariant scalars.
//
// Residual sublayers normalize their input (pre-norm), and every update
// that writes coordinates re-projects onto the zero-CoM subspace. All
// learned coordinate updates start as the identity (zero-initialized output
// layers), so a freshly constructed model echoes its input coordinates.

#ifndef MIDI_DENOISER_MODEL_HPP
#define MIDI_DENOISER_MODEL_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "midi/denoiser/modules.hpp"
#include "midi/moldata/molecule.hpp"

namespace midi::denoiser {

struct DenoiserConfig {
  int n_layers = 6;
  int node_dim = 128;
  int edge_dim = 64;
  int global_dim = 128;
  int n_heads = 8;
  int t_emb_dim = 32;
  int pos_hidden = 16;     // hidden width of the coordinate gate MLP
  int max_timestep = 500;  // accepted timestep range is [0, max_timestep]
  double delta = 1e-6;     // guard for norms and cosine denominators

  void validate() const;  // throws std::invalid_argument
};

// Clean-state prediction for one noisy graph at one timestep. Probability
// rows sum to one; pY is symmetric in its first two axes; R_hat is centered.
struct DenoiserOutput {
  numkit::Tensor R_hat;  // [n, 3]
  numkit::Tensor pX;     // [n, atom types]
  numkit::Tensor pC;     // [n, charge types]
  numkit::Tensor pY;     // [n, n, bond types]
};

class Denoiser {
 public:
  Denoiser(const DenoiserConfig& cfg, int n_atom_types, int n_charge_types,
           int n_bond_types, uint64_t init_seed);

  // t must lie in [0, max_timestep]; the graph must be non-empty.
  DenoiserOutput forward(const moldata::OneHotGraph& g, int t) const;

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const DenoiserConfig& config() const { return cfg_; }

  // Test hook: called with a label and the coordinate tensor after every
  // sublayer that writes coordinates.
  std::function<void(const std::string&, const numkit::Tensor&)> coord_probe;

 private:
  struct Block {
    LayerNorm ln_e, ln_h, ln_w, ln_h_ff, ln_e_ff;
    Mlp edge_mlp, global_mlp, phi_mlp, node_ff, edge_ff;
    Linear attn_q, attn_k, attn_v, edge_bias, desc_bias, film, attn_out;
    PnaPool pna_edge, pna_desc;
    numkit::Tensor coord_gamma, ff_gamma;
    PosMlp pos_mlp;
  };

  DenoiserConfig cfg_;
  int n_atom_types_, n_charge_types_, n_bond_types_;
  ParameterStore params_;

  Linear embed_h_, embed_e_, embed_w_;
  std::vector<Block> blocks_;
  LayerNorm final_ln_h_, final_ln_e_;
  Linear dec_x_, dec_c_, dec_y_;
  Mlp head_phi_;
  numkit::Tensor head_gamma_;
};

}  // namespace midi::denoiser

#endif
