#include "usergraph/eval.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

EvalReport evaluate(const std::vector<Prediction>& predictions, const Corpus& corpus,
                    const EvalOptions& options) {
  if (!options.include_weak_labeled && options.weak == nullptr) {
    throw std::invalid_argument("evaluate: excluding weak users requires the weak labeling");
  }
  std::unordered_map<std::string_view, int> pred_by_id;
  for (const Prediction& p : predictions) pred_by_id.emplace(p.user_id, p.label);

  std::vector<int> gold, pred;
  int weak_overlap = 0;
  for (const User& u : corpus.users) {
    if (!u.gold_label) continue;
    const bool has_weak = options.weak && options.weak->label_of(u.user_id).has_value();
    if (!options.include_weak_labeled && has_weak) continue;
    auto it = pred_by_id.find(u.user_id);
    if (it == pred_by_id.end()) {
      throw std::runtime_error("evaluate: no prediction for gold user \"" + u.user_id + "\"");
    }
    if (has_weak) ++weak_overlap;
    gold.push_back(*u.gold_label);
    pred.push_back(it->second);
  }
  if (gold.empty()) throw std::runtime_error("evaluate: no gold-labeled users to evaluate");

  EvalReport r;
  r.confusion = ConfusionMatrix::from_labels(gold, pred);
  r.n_eval = static_cast<int>(gold.size());
  r.n_weak_overlap = weak_overlap;
  r.accuracy = accuracy(r.confusion);
  r.macro_f1 = macro_f1(r.confusion);
  r.per_class = per_class_scores(r.confusion);
  r.config_fingerprint = options.config_fingerprint;
  return r;
}

std::vector<AblationRow> run_ablation(const Corpus& corpus, const WeakLabeling& weak,
                                      const EmConfig& config, const ModelSetup& model,
                                      const EvalOptions& options) {
  std::vector<AblationRow> rows;
  for (GraphView view : {GraphView::Des, GraphView::Net, GraphView::DesNet}) {
    EmConfig single_pass = config;
    single_pass.max_iterations = 1;
    for (const auto& [name, cfg] :
         {std::pair<const char*, const EmConfig*>{"label_propagation", &single_pass},
          std::pair<const char*, const EmConfig*>{"em_style", &config}}) {
      EmRunReport report = run_em(corpus, weak, *cfg, view, model);
      AblationRow row;
      row.model = name;
      row.view = view;
      row.report = evaluate(report.final_predictions, corpus, options);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "model,view,accuracy,macro_f1\n";
  for (const AblationRow& r : rows) {
    out << r.model << ',' << to_string(r.view) << ',' << r.report.accuracy << ','
        << r.report.macro_f1 << '\n';
  }
  return out.str();
}

std::string eval_report_to_json(const EvalReport& r) {
  ordered_json j;
  j["n_eval"] = r.n_eval;
  j["n_weak_overlap"] = r.n_weak_overlap;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  for (int c = 0; c < 2; ++c) {
    ordered_json cj;
    cj["precision"] = r.per_class[c].precision;
    cj["recall"] = r.per_class[c].recall;
    cj["f1"] = r.per_class[c].f1;
    j["class_" + std::to_string(c)] = std::move(cj);
  }
  ordered_json cm = json::array();
  for (int g = 0; g < 2; ++g) cm.push_back({r.confusion.counts[g][0], r.confusion.counts[g][1]});
  j["confusion"] = std::move(cm);
  if (!r.config_fingerprint.empty()) j["config_fingerprint"] = r.config_fingerprint;
  return j.dump(2);
}

void export_embeddings(const EmbeddingSpace& space, const InfoGraph& graph,
                       const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open embedding export file: " + path);
  out.precision(17);

  const std::vector<Prediction> preds = predict_types(space, graph, corpus);
  const Eigen::MatrixXd user_vecs = space.all_user_vectors();

  out << "node_id,kind,gold_label,predicted_label";
  for (int c = 0; c < space.d; ++c) out << ",v" << c;
  out << '\n';

  auto write_row = [&](const std::string& node_id, const char* kind, const std::string& gold,
                       const std::string& predicted, const auto& vec) {
    out << node_id << ',' << kind << ',' << gold << ',' << predicted;
    for (int c = 0; c < space.d; ++c) out << ',' << vec(c);
    out << '\n';
  };

  for (int u = 0; u < graph.n_users(); ++u) {
    const User& user = corpus.users[static_cast<std::size_t>(u)];
    const std::string gold = user.gold_label ? corpus.type_names[*user.gold_label] : "";
    const std::string predicted = corpus.type_names[preds[static_cast<std::size_t>(u)].label];
    write_row("user:" + user.user_id, "user", gold, predicted, user_vecs.row(u));
  }
  for (int u = 0; u < graph.n_users(); ++u) {
    const User& user = corpus.users[static_cast<std::size_t>(u)];
    const std::string gold = user.gold_label ? corpus.type_names[*user.gold_label] : "";
    const std::string predicted = corpus.type_names[preds[static_cast<std::size_t>(u)].label];
    write_row("desc:" + user.user_id, "desc", gold, predicted, space.desc_vectors.row(u));
  }
  for (int t = 0; t < kNumTypes; ++t) {
    write_row("type:" + corpus.type_names[t], "type", corpus.type_names[t],
              corpus.type_names[t], space.type_vectors.row(t));
  }
}

}  // namespace usergraph
