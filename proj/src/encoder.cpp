// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "gumbelrec/kernels.hpp"
#include "gumbelrec/numeric.hpp"

namespace gumbelrec {

namespace {

Mat uniform_fan_in(Rng& rng, std::size_t rows, std::size_t cols) {
  Mat m(rows, cols);
  double s = 1.0 / std::sqrt(static_cast<double>(rows));
  for (auto& v : m.data) v = s * (2.0 * rng.uniform() - 1.0);
  return m;
}

void check_finite(const Mat& m, const char* where) {
  for (double v : m.data)
    if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite values in ") + where);
}

// Shared forward for one block. If trace is non-null, intermediates are kept.
Mat block_forward(const Mat& x, const EncoderBlock& blk, std::size_t heads,
                  EncoderTrace::BlockTrace* trace) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  Mat concat(n, d);
  std::vector<Mat> qs, ks, vs, atts;
  for (std::size_t h = 0; h < heads; h++) {
    Mat q = matmul(x, blk.wq[h]);
    Mat k = matmul(x, blk.wk[h]);
    Mat v = matmul(x, blk.wv[h]);
    // causal attention: row i attends to positions 0..i only
    Mat att(n, n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; i++) {
      for (std::size_t j = 0; j <= i; j++)
        scores[j] = scale * kernels::dot(q.row(i), k.row(j), dh);
      softmax(scores.data(), att.row(i), i + 1);  // entries past i stay zero
    }
    for (std::size_t i = 0; i < n; i++) {
      double* out = concat.row(i) + h * dh;
      for (std::size_t j = 0; j <= i; j++) kernels::axpy(att.at(i, j), v.row(j), out, dh);
    }
    if (trace) {
      qs.push_back(std::move(q));
      ks.push_back(std::move(k));
      vs.push_back(std::move(v));
      atts.push_back(std::move(att));
    }
  }

  Mat mixed = matmul(concat, blk.wo);
  Mat pre(n, d);
  for (std::size_t i = 0; i < n; i++) {
    double* row = pre.row(i);
    std::copy(blk.b1.begin(), blk.b1.end(), row);
    for (std::size_t k = 0; k < d; k++) kernels::axpy(mixed.at(i, k), blk.w1.row(k), row, d);
  }
  Mat relu_out(n, d);
  kernels::relu(pre.data.data(), relu_out.data.data(), pre.data.size());
  Mat out(n, d);
  for (std::size_t i = 0; i < n; i++) {
    double* row = out.row(i);
    std::copy(blk.b2.begin(), blk.b2.end(), row);
    for (std::size_t k = 0; k < d; k++) kernels::axpy(relu_out.at(i, k), blk.w2.row(k), row, d);
  }
  check_finite(out, "attention block output");

  if (trace) {
    trace->q = std::move(qs);
    trace->k = std::move(ks);
    trace->v = std::move(vs);
    trace->att = std::move(atts);
    trace->concat = std::move(concat);
    trace->mixed = std::move(mixed);
    trace->pre = std::move(pre);
    trace->out = out;
  }
  return out;
}

// Backward through one block. dx receives the gradient w.r.t. the block input.
void block_backward(const Mat& x, const EncoderBlock& blk, std::size_t heads,
                    const EncoderTrace::BlockTrace& t, const Mat& d_out, EncoderBlock& g,
                    Mat& dx) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  // ffn tail
  Mat relu_out(n, d);
  kernels::relu(t.pre.data.data(), relu_out.data.data(), t.pre.data.size());
  colsum_acc(d_out, g.b2.data());
  matmul_atb_acc(relu_out, d_out, g.w2);
  Mat d_relu = matmul_abt(d_out, blk.w2);
  Mat d_pre(n, d);
  kernels::relu_mask(t.pre.data.data(), d_relu.data.data(), d_pre.data.data(), d_pre.data.size());
  colsum_acc(d_pre, g.b1.data());
  matmul_atb_acc(t.mixed, d_pre, g.w1);
  Mat d_mixed = matmul_abt(d_pre, blk.w1);

  matmul_atb_acc(t.concat, d_mixed, g.wo);
  Mat d_concat = matmul_abt(d_mixed, blk.wo);

  dx.zero();
  Mat d_head(n, dh), d_att(n, n), d_scores(n, n), d_q(n, dh), d_k(n, dh), d_v(n, dh);
  for (std::size_t h = 0; h < heads; h++) {
    for (std::size_t i = 0; i < n; i++)
      std::copy(d_concat.row(i) + h * dh, d_concat.row(i) + (h + 1) * dh, d_head.row(i));

    // head output H = att V
    d_att.zero();
    d_v.zero();
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j <= i; j++) {
        d_att.at(i, j) = kernels::dot(d_head.row(i), t.v[h].row(j), dh);
        kernels::axpy(t.att[h].at(i, j), d_head.row(i), d_v.row(j), dh);
      }

    // row softmax over the causal support
    for (std::size_t i = 0; i < n; i++) {
      double dot = 0.0;
      for (std::size_t j = 0; j <= i; j++) dot += d_att.at(i, j) * t.att[h].at(i, j);
      for (std::size_t j = 0; j < n; j++)
        d_scores.at(i, j) = j <= i ? t.att[h].at(i, j) * (d_att.at(i, j) - dot) : 0.0;
    }

    // scores = scale * q k^T on the causal support
    d_q.zero();
    d_k.zero();
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j <= i; j++) {
        double ds = scale * d_scores.at(i, j);
        kernels::axpy(ds, t.k[h].row(j), d_q.row(i), dh);
        kernels::axpy(ds, t.q[h].row(i), d_k.row(j), dh);
      }

    matmul_atb_acc(x, d_q, g.wq[h]);
    matmul_atb_acc(x, d_k, g.wk[h]);
    matmul_atb_acc(x, d_v, g.wv[h]);
    Mat dx_q = matmul_abt(d_q, blk.wq[h]);
    Mat dx_k = matmul_abt(d_k, blk.wk[h]);
    Mat dx_v = matmul_abt(d_v, blk.wv[h]);
    kernels::add(dx.data.data(), dx_q.data.data(), dx.data.size());
    kernels::add(dx.data.data(), dx_k.data.data(), dx.data.size());
    kernels::add(dx.data.data(), dx_v.data.data(), dx.data.size());
  }
}

void build_tokens(const HistoryPrefix& prefix, const EncoderParams& p,
                  std::vector<std::size_t>& rows, std::vector<int>& flags) {
  std::size_t start = prefix.size() > p.window ? prefix.size() - p.window : 0;
  rows.clear();
  flags.clear();
  for (std::size_t i = start; i < prefix.size(); i++) {
    if (prefix[i].item >= p.catalog) throw std::out_of_range("item id out of range");
    if (prefix[i].feedback > 1) throw std::out_of_range("feedback flag must be 0 or 1");
    rows.push_back(prefix[i].item + 1);
    flags.push_back(static_cast<int>(prefix[i].feedback));
  }
  if (rows.empty()) {
    rows.push_back(0);  // start token
    flags.push_back(-1);
  }
}

}  // namespace

EncoderParams EncoderParams::init(std::size_t catalog, std::size_t d, std::size_t heads,
                                  std::size_t blocks, std::size_t window, Rng& rng,
                                  double emb_sigma) {
  if (d == 0 || heads == 0 || d % heads != 0)
    throw std::invalid_argument("encoder width must be a positive multiple of the head count");
  if (window == 0) throw std::invalid_argument("window must be positive");
  EncoderParams p;
  p.catalog = catalog;
  p.d = d;
  p.heads = heads;
  p.window = window;
  p.item_emb = Mat(catalog + 1, d);
  p.item_emb.fill_gaussian(rng, emb_sigma);
  p.pos_emb = Mat(window, d);
  p.pos_emb.fill_gaussian(rng, emb_sigma);
  p.feedback_emb = Mat(2, d);
  p.feedback_emb.fill_gaussian(rng, emb_sigma);
  p.blocks.resize(blocks);
  const std::size_t dh = d / heads;
  for (auto& blk : p.blocks) {
    for (std::size_t h = 0; h < heads; h++) {
      blk.wq.push_back(uniform_fan_in(rng, d, dh));
      blk.wk.push_back(uniform_fan_in(rng, d, dh));
      blk.wv.push_back(uniform_fan_in(rng, d, dh));
    }
    blk.wo = uniform_fan_in(rng, d, d);
    blk.w1 = uniform_fan_in(rng, d, d);
    blk.w2 = uniform_fan_in(rng, d, d);
    blk.b1.assign(d, 0.0);
    blk.b2.assign(d, 0.0);
  }
  return p;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z = *this;
  z.visit([](const std::string&, std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
  return z;
}

Mat embed_sequence(const HistoryPrefix& prefix, const EncoderParams& params) {
  std::vector<std::size_t> rows;
  std::vector<int> flags;
  build_tokens(prefix, params, rows, flags);
  const std::size_t n = rows.size();
  Mat e(n, params.d);
  for (std::size_t i = 0; i < n; i++) {
    double* out = e.row(i);
    std::copy(params.item_emb.row(rows[i]), params.item_emb.row(rows[i]) + params.d, out);
    if (flags[i] >= 0) kernels::add(out, params.feedback_emb.row(flags[i]), params.d);
    kernels::add(out, params.pos_emb.row(i), params.d);
  }
  return e;
}

Mat attention_block(const Mat& s_in, const EncoderBlock& blk, std::size_t heads) {
  return block_forward(s_in, blk, heads, nullptr);
}

std::vector<double> EncoderTrace::state() const {
  const Mat& f = final_out();
  const double* last = f.row(f.rows - 1);
  return std::vector<double>(last, last + f.cols);
}

EncoderTrace encode_trace(const HistoryPrefix& prefix, const EncoderParams& params) {
  EncoderTrace t;
  build_tokens(prefix, params, t.token_rows, t.token_flags);
  const std::size_t n = t.token_rows.size();
  t.e_hat = Mat(n, params.d);
  for (std::size_t i = 0; i < n; i++) {
    double* out = t.e_hat.row(i);
    const double* item = params.item_emb.row(t.token_rows[i]);
    std::copy(item, item + params.d, out);
    if (t.token_flags[i] >= 0) kernels::add(out, params.feedback_emb.row(t.token_flags[i]), params.d);
    kernels::add(out, params.pos_emb.row(i), params.d);
  }
  t.blocks.resize(params.blocks.size());
  const Mat* x = &t.e_hat;
  for (std::size_t b = 0; b < params.blocks.size(); b++) {
    block_forward(*x, params.blocks[b], params.heads, &t.blocks[b]);
    x = &t.blocks[b].out;
  }
  return t;
}

std::vector<double> encode_state(const HistoryPrefix& prefix, const EncoderParams& params) {
  return encode_trace(prefix, params).state();
}

void encode_backward(const EncoderTrace& trace, const EncoderParams& params, const Mat& d_out,
                     EncoderParams& grad) {
  const std::size_t n = trace.token_rows.size();
  Mat dy = d_out;
  Mat dx(n, params.d);
  for (std::size_t b = params.blocks.size(); b-- > 0;) {
    const Mat& x = b == 0 ? trace.e_hat : trace.blocks[b - 1].out;
    block_backward(x, params.blocks[b], params.heads, trace.blocks[b], dy, grad.blocks[b], dx);
    dy = dx;
  }
  for (std::size_t i = 0; i < n; i++) {
    const double* row = dy.row(i);
    kernels::add(grad.item_emb.row(trace.token_rows[i]), row, params.d);
    if (trace.token_flags[i] >= 0)
      kernels::add(grad.feedback_emb.row(trace.token_flags[i]), row, params.d);
    kernels::add(grad.pos_emb.row(i), row, params.d);
  }
}

void encode_backward_state(const EncoderTrace& trace, const EncoderParams& params,
                           const std::vector<double>& d_state, EncoderParams& grad) {
  const std::size_t n = trace.token_rows.size();
  Mat d_out(n, params.d);
  std::copy(d_state.begin(), d_state.end(), d_out.row(n - 1));
  encode_backward(trace, params, d_out, grad);
}

}  // namespace gumbelrec
