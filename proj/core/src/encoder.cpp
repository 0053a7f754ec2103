#include "usergraph/encoder.hpp"

#include <stdexcept>

namespace usergraph {

const char* to_string(EncoderVariant v) {
  return v == EncoderVariant::MeanPool ? "meanpool" : "bilstm";
}

EncoderVariant encoder_variant_from_string(const std::string& s) {
  if (s == "meanpool") return EncoderVariant::MeanPool;
  if (s == "bilstm") return EncoderVariant::BiLstm;
  throw std::runtime_error("unknown encoder variant \"" + s + "\" (expected meanpool|bilstm)");
}

namespace {

void fill_uniform(Eigen::MatrixXd& m, Rng& rng, double lo, double hi) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.next_range(lo, hi);
  }
}

LstmDirection init_direction(int hidden, int word_dim, Rng& rng) {
  LstmDirection dir;
  dir.wx.resize(4 * hidden, word_dim);
  dir.wh.resize(4 * hidden, hidden);
  dir.b = Eigen::MatrixXd::Zero(4 * hidden, 1);
  fill_uniform(dir.wx, rng, -0.08, 0.08);
  fill_uniform(dir.wh, rng, -0.08, 0.08);
  dir.b.block(hidden, 0, hidden, 1).setOnes();  // forget gate bias
  return dir;
}

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& a) {
  return 1.0 / (1.0 + (-a).exp());
}

// Runs one direction over columns of x taken in the order given by
// position(s); caches gates per processing step when cache is non-null.
// Returns the row-wise mean of the hidden states.
Eigen::VectorXd run_direction(const LstmDirection& dir, const Eigen::MatrixXd& x,
                              int hidden, bool reversed,
                              EncoderActivation::DirCache* cache) {
  const int steps = static_cast<int>(x.cols());
  const int h = hidden;
  if (cache) {
    cache->i.resize(h, steps);
    cache->f.resize(h, steps);
    cache->g.resize(h, steps);
    cache->o.resize(h, steps);
    cache->c.resize(h, steps);
    cache->h.resize(h, steps);
  }
  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd h_sum = Eigen::VectorXd::Zero(h);
  for (int s = 0; s < steps; ++s) {
    const int pos = reversed ? steps - 1 - s : s;
    Eigen::VectorXd a = dir.wx * x.col(pos) + dir.wh * h_prev + dir.b.col(0);
    Eigen::ArrayXd gi = sigmoid(a.segment(0, h).array());
    Eigen::ArrayXd gf = sigmoid(a.segment(h, h).array());
    Eigen::ArrayXd gg = a.segment(2 * h, h).array().tanh();
    Eigen::ArrayXd go = sigmoid(a.segment(3 * h, h).array());
    Eigen::ArrayXd c = gf * c_prev.array() + gi * gg;
    Eigen::ArrayXd hh = go * c.tanh();
    if (cache) {
      cache->i.col(s) = gi.matrix();
      cache->f.col(s) = gf.matrix();
      cache->g.col(s) = gg.matrix();
      cache->o.col(s) = go.matrix();
      cache->c.col(s) = c.matrix();
      cache->h.col(s) = hh.matrix();
    }
    c_prev = c.matrix();
    h_prev = hh.matrix();
    h_sum += h_prev;
  }
  return h_sum / static_cast<double>(steps);
}

// BPTT for one direction. dh_ext is the (constant) per-step gradient on the
// hidden state coming from the time average. Accumulates parameter grads
// into gdir and input grads into dx (word_dim x steps, by position).
void backprop_direction(const LstmDirection& dir, const Eigen::MatrixXd& x,
                        const EncoderActivation::DirCache& cache, int hidden,
                        bool reversed, const Eigen::VectorXd& dh_ext,
                        LstmDirection& gdir, Eigen::MatrixXd& dx) {
  const int steps = static_cast<int>(x.cols());
  const int h = hidden;
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd da(4 * h);
  for (int s = steps - 1; s >= 0; --s) {
    const int pos = reversed ? steps - 1 - s : s;
    const Eigen::ArrayXd gi = cache.i.col(s).array();
    const Eigen::ArrayXd gf = cache.f.col(s).array();
    const Eigen::ArrayXd gg = cache.g.col(s).array();
    const Eigen::ArrayXd go = cache.o.col(s).array();
    const Eigen::ArrayXd c = cache.c.col(s).array();
    const Eigen::ArrayXd tanh_c = c.tanh();

    const Eigen::ArrayXd dh = (dh_ext + dh_next).array();
    const Eigen::ArrayXd dout = dh * tanh_c;
    const Eigen::ArrayXd dc = dc_next.array() + dh * go * (1.0 - tanh_c.square());
    const Eigen::ArrayXd di = dc * gg;
    const Eigen::ArrayXd dg = dc * gi;
    Eigen::ArrayXd df;
    if (s > 0) {
      df = dc * cache.c.col(s - 1).array();
    } else {
      df = Eigen::ArrayXd::Zero(h);  // c_{-1} = 0
    }

    da.segment(0, h) = (di * gi * (1.0 - gi)).matrix();
    da.segment(h, h) = (df * gf * (1.0 - gf)).matrix();
    da.segment(2 * h, h) = (dg * (1.0 - gg.square())).matrix();
    da.segment(3 * h, h) = (dout * go * (1.0 - go)).matrix();

    gdir.wx.noalias() += da * x.col(pos).transpose();
    if (s > 0) gdir.wh.noalias() += da * cache.h.col(s - 1).transpose();
    gdir.b.col(0) += da;

    dx.col(pos).noalias() += dir.wx.transpose() * da;
    dh_next.noalias() = dir.wh.transpose() * da;
    dc_next = (dc * gf).matrix();
  }
}

}  // namespace

EncoderParams EncoderParams::mean_pool(int d, int word_dim, Rng& rng) {
  if (d <= 0 || word_dim <= 0) throw std::invalid_argument("encoder: dims must be positive");
  EncoderParams p;
  p.variant = EncoderVariant::MeanPool;
  p.d = d;
  p.word_dim = word_dim;
  p.hidden = 0;
  p.proj.resize(d, word_dim);
  fill_uniform(p.proj, rng, -0.08, 0.08);
  return p;
}

EncoderParams EncoderParams::bilstm(int hidden, int word_dim, Rng& rng) {
  if (hidden <= 0 || word_dim <= 0) throw std::invalid_argument("encoder: dims must be positive");
  EncoderParams p;
  p.variant = EncoderVariant::BiLstm;
  p.hidden = hidden;
  p.d = 2 * hidden;
  p.word_dim = word_dim;
  p.fwd = init_direction(hidden, word_dim, rng);
  p.bwd = init_direction(hidden, word_dim, rng);
  return p;
}

std::vector<Eigen::MatrixXd*> EncoderParams::tensors() {
  if (variant == EncoderVariant::MeanPool) return {&proj};
  return {&fwd.wx, &fwd.wh, &fwd.b, &bwd.wx, &bwd.wh, &bwd.b};
}

std::vector<const Eigen::MatrixXd*> EncoderParams::tensors() const {
  if (variant == EncoderVariant::MeanPool) return {&proj};
  return {&fwd.wx, &fwd.wh, &fwd.b, &bwd.wx, &bwd.wh, &bwd.b};
}

void EncoderParams::validate() const {
  if (max_seq_len <= 0) throw std::invalid_argument("encoder: max_seq_len must be positive");
  if (variant == EncoderVariant::MeanPool) {
    if (proj.rows() != d || proj.cols() != word_dim) {
      throw std::invalid_argument("encoder: projection shape mismatch");
    }
  } else {
    if (d != 2 * hidden) throw std::invalid_argument("encoder: d must equal 2*hidden");
    for (const LstmDirection* dir : {&fwd, &bwd}) {
      if (dir->wx.rows() != 4 * hidden || dir->wx.cols() != word_dim ||
          dir->wh.rows() != 4 * hidden || dir->wh.cols() != hidden ||
          dir->b.rows() != 4 * hidden || dir->b.cols() != 1) {
        throw std::invalid_argument("encoder: LSTM parameter shape mismatch");
      }
    }
  }
  for (const auto* t : tensors()) {
    if (!t->allFinite()) throw std::invalid_argument("encoder: non-finite parameters");
  }
}

EncoderGrads EncoderGrads::zero_like(const EncoderParams& p) {
  EncoderGrads g;
  if (p.variant == EncoderVariant::MeanPool) {
    g.proj = Eigen::MatrixXd::Zero(p.proj.rows(), p.proj.cols());
  } else {
    for (auto [dst, src] : {std::pair{&g.fwd, &p.fwd}, std::pair{&g.bwd, &p.bwd}}) {
      dst->wx = Eigen::MatrixXd::Zero(src->wx.rows(), src->wx.cols());
      dst->wh = Eigen::MatrixXd::Zero(src->wh.rows(), src->wh.cols());
      dst->b = Eigen::MatrixXd::Zero(src->b.rows(), src->b.cols());
    }
  }
  return g;
}

std::vector<Eigen::MatrixXd*> EncoderGrads::tensors() {
  if (proj.size() > 0) return {&proj};
  return {&fwd.wx, &fwd.wh, &fwd.b, &bwd.wx, &bwd.wh, &bwd.b};
}

std::vector<const Eigen::MatrixXd*> EncoderGrads::tensors() const {
  if (proj.size() > 0) return {&proj};
  return {&fwd.wx, &fwd.wh, &fwd.b, &bwd.wx, &bwd.wh, &bwd.b};
}

void EncoderGrads::add_scaled(const EncoderGrads& other, double scale) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (std::size_t i = 0; i < mine.size(); ++i) *mine[i] += scale * *theirs[i];
  for (const auto& [row, grad] : other.word_grads) {
    auto it = word_grads.find(row);
    if (it == word_grads.end()) {
      word_grads.emplace(row, scale * grad);
    } else {
      it->second += scale * grad;
    }
  }
}

Eigen::VectorXd encode_rows(const VocabEmbeddings& vocab, const EncoderParams& params,
                            const std::vector<int>& rows, EncoderActivation* activation) {
  if (vocab.dim != params.word_dim) {
    throw std::invalid_argument("encoder: word-vector dim does not match params");
  }
  const int steps = static_cast<int>(rows.size());
  if (activation) {
    *activation = EncoderActivation{};
    activation->steps = steps;
    activation->rows = rows;
  }
  if (steps == 0) return Eigen::VectorXd::Zero(params.d);

  Eigen::MatrixXd x(params.word_dim, steps);
  for (int t = 0; t < steps; ++t) x.col(t) = vocab.matrix.row(rows[t]).transpose();
  if (activation) activation->x = x;

  if (params.variant == EncoderVariant::MeanPool) {
    Eigen::VectorXd xbar = x.rowwise().mean();
    if (activation) activation->xbar = xbar;
    return params.proj * xbar;
  }

  Eigen::VectorXd out(params.d);
  out.head(params.hidden) = run_direction(params.fwd, x, params.hidden, false,
                                          activation ? &activation->fwd : nullptr);
  out.tail(params.hidden) = run_direction(params.bwd, x, params.hidden, true,
                                          activation ? &activation->bwd : nullptr);
  return out;
}

Eigen::VectorXd encode_user(const VocabEmbeddings& vocab, const EncoderParams& params,
                            const std::vector<TokenSeq>& tweets,
                            EncoderActivation* activation) {
  std::vector<int> rows;
  for (const TokenSeq& tweet : tweets) {
    for (const std::string& token : tweet) {
      if (static_cast<int>(rows.size()) >= params.max_seq_len) break;
      rows.push_back(vocab.row_of(token));
    }
    if (static_cast<int>(rows.size()) >= params.max_seq_len) break;
  }
  return encode_rows(vocab, params, rows, activation);
}

EncoderGrads encoder_backward(const EncoderParams& params,
                              const EncoderActivation& activation,
                              const Eigen::VectorXd& grad_out) {
  if (grad_out.size() != params.d) {
    throw std::invalid_argument("encoder_backward: grad_out size mismatch");
  }
  EncoderGrads grads = EncoderGrads::zero_like(params);
  const int steps = activation.steps;
  if (steps == 0) return grads;
  if (activation.x.rows() != params.word_dim || activation.x.cols() != steps ||
      static_cast<int>(activation.rows.size()) != steps) {
    throw std::invalid_argument("encoder_backward: activation does not match params");
  }

  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(params.word_dim, steps);
  if (params.variant == EncoderVariant::MeanPool) {
    if (activation.xbar.size() != params.word_dim) {
      throw std::invalid_argument("encoder_backward: activation missing mean cache");
    }
    grads.proj.noalias() = grad_out * activation.xbar.transpose();
    const Eigen::VectorXd dxbar = params.proj.transpose() * grad_out;
    dx.colwise() += (dxbar / static_cast<double>(steps)).eval();
  } else {
    if (activation.fwd.h.cols() != steps || activation.fwd.h.rows() != params.hidden) {
      throw std::invalid_argument("encoder_backward: activation does not match params");
    }
    const double inv_steps = 1.0 / static_cast<double>(steps);
    const Eigen::VectorXd dh_fwd = grad_out.head(params.hidden) * inv_steps;
    const Eigen::VectorXd dh_bwd = grad_out.tail(params.hidden) * inv_steps;
    backprop_direction(params.fwd, activation.x, activation.fwd, params.hidden, false,
                       dh_fwd, grads.fwd, dx);
    backprop_direction(params.bwd, activation.x, activation.bwd, params.hidden, true,
                       dh_bwd, grads.bwd, dx);
  }

  for (int t = 0; t < steps; ++t) {
    const int row = activation.rows[t];
    auto it = grads.word_grads.find(row);
    if (it == grads.word_grads.end()) {
      grads.word_grads.emplace(row, dx.col(t));
    } else {
      it->second += dx.col(t);
    }
  }
  return grads;
}

}  // namespace usergraph
