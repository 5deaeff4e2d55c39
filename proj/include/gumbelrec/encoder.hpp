// SPDX-License-Identifier: Apache-2.0
//
// Sequential preference encoder. A history prefix of (item, feedback-flag)
// tokens becomes Ê = E + P (position added once, before the first block),
// passes through b causally-masked self-attention blocks with point-wise
// feed-forward tails, and the last row of the final block is the state.
// No residual connections, layer norm, or dropout.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gumbelrec/mat.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

struct HistoryEvent {
  std::size_t item = 0;     // catalog id in [0, catalog)
  std::size_t feedback = 0; // binary flag: 1 = positive (click/purchase), 0 = none
};

using HistoryPrefix = std::vector<HistoryEvent>;

struct EncoderBlock {
  std::vector<Mat> wq, wk, wv;  // one (d x d/h) projection per head
  Mat wo;                       // d x d head mix
  Mat w1, w2;                   // d x d feed-forward
  std::vector<double> b1, b2;   // d
};

struct EncoderParams {
  std::size_t catalog = 0;  // |A|
  std::size_t d = 50;
  std::size_t heads = 1;
  std::size_t window = 10;  // w: prefixes keep the most recent w tokens

  Mat item_emb;      // (catalog+1) x d, row 0 is the start token
  Mat pos_emb;       // window x d
  Mat feedback_emb;  // 2 x d additive offset per feedback flag
  std::vector<EncoderBlock> blocks;

  static EncoderParams init(std::size_t catalog, std::size_t d, std::size_t heads,
                            std::size_t blocks, std::size_t window, Rng& rng,
                            double emb_sigma = 0.02);
  EncoderParams zeros_like() const;

  template <class F> void visit(F&& f) { visit_impl(*this, f); }
  template <class F> void visit(F&& f) const { visit_impl(*this, f); }

 private:
  template <class Self, class F> static void visit_impl(Self& self, F& f) {
    f(std::string("enc.item_emb"), self.item_emb.data);
    f(std::string("enc.pos_emb"), self.pos_emb.data);
    f(std::string("enc.feedback_emb"), self.feedback_emb.data);
    for (std::size_t b = 0; b < self.blocks.size(); b++) {
      auto& blk = self.blocks[b];
      std::string base = "enc.block" + std::to_string(b) + ".";
      for (std::size_t h = 0; h < blk.wq.size(); h++) {
        std::string head = std::to_string(h);
        f(base + "wq" + head, blk.wq[h].data);
        f(base + "wk" + head, blk.wk[h].data);
        f(base + "wv" + head, blk.wv[h].data);
      }
      f(base + "wo", blk.wo.data);
      f(base + "w1", blk.w1.data);
      f(base + "b1", blk.b1);
      f(base + "w2", blk.w2.data);
      f(base + "b2", blk.b2);
    }
  }
};

// Ê for a (truncated) prefix: one row per kept token, start-token row for an
// empty prefix. Also reports which embedding rows built each position so the
// backward pass can scatter gradients.
Mat embed_sequence(const HistoryPrefix& prefix, const EncoderParams& params);

// Forward through one block; exposed for the straight-line re-implementation
// test. Input is n x d, output n x d.
Mat attention_block(const Mat& s_in, const EncoderBlock& blk, std::size_t heads);

// Full forward pass with every intermediate needed by the backward pass.
struct EncoderTrace {
  Mat e_hat;
  struct BlockTrace {
    std::vector<Mat> q, k, v;  // per head, n x d/h
    std::vector<Mat> att;      // per head, n x n row-softmax probabilities
    Mat concat;                // n x d
    Mat mixed;                 // n x d (concat * wo)
    Mat pre;                   // n x d ffn pre-activation
    Mat out;                   // n x d
  };
  std::vector<BlockTrace> blocks;
  std::vector<std::size_t> token_rows;  // item-table row per position
  std::vector<int> token_flags;         // feedback row per position, -1 for the start token

  const Mat& final_out() const { return blocks.empty() ? e_hat : blocks.back().out; }
  std::vector<double> state() const;
};

EncoderTrace encode_trace(const HistoryPrefix& prefix, const EncoderParams& params);

// Convenience: last row of the final block.
std::vector<double> encode_state(const HistoryPrefix& prefix, const EncoderParams& params);

// Accumulates parameter gradients for a scalar objective whose gradient w.r.t.
// the final n x d output is d_out. grad must be zeros_like-shaped.
void encode_backward(const EncoderTrace& trace, const EncoderParams& params, const Mat& d_out,
                     EncoderParams& grad);

// Same, for objectives that only read the state (last row).
void encode_backward_state(const EncoderTrace& trace, const EncoderParams& params,
                           const std::vector<double>& d_state, EncoderParams& grad);

}  // namespace gumbelrec
