#include "molkd/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "molkd/evalkit.hpp"

namespace molkd {

std::string task_name(TaskKind kind) {
  return kind == TaskKind::binary_classification ? "classification" : "regression";
}

TaskKind task_from_name(const std::string& name) {
  if (name == "classification") return TaskKind::binary_classification;
  if (name == "regression") return TaskKind::regression;
  throw Error(Errc::bad_config, "unknown task kind '" + name + "'");
}

void DistillConfig::validate() const {
  if (temperature <= 0.0) throw Error(Errc::bad_config, "temperature must be positive");
  if (beta < 0.0 || beta > 1.0) {
    throw Error(Errc::beta_out_of_range, "beta must lie in [0, 1]");
  }
  if (student_dim < 1 || student_hidden < 1) throw Error(Errc::bad_config, "dims must be >= 1");
  if (layers < 1) throw Error(Errc::bad_config, "layer count must be >= 1");
  if (epochs < 0) throw Error(Errc::bad_config, "epochs must be >= 0");
  if (batch_size < 1) throw Error(Errc::bad_config, "batch size must be >= 1");
}

Tensor infonce_kd_loss(const Tensor& student_reps, const Tensor& teacher_reps,
                       double temperature) {
  if (student_reps.rank() != 2 || teacher_reps.rank() != 2 ||
      student_reps.rows() != teacher_reps.rows() || student_reps.cols() != teacher_reps.cols()) {
    throw Error(Errc::dim_mismatch, "student and teacher batches differ in shape");
  }
  if (temperature <= 0.0) {
    throw Error(Errc::bad_config, "temperature must be positive");
  }
  const std::size_t b = student_reps.rows();
  const double inv_tau = 1.0 / temperature;

  std::vector<Tensor> per_anchor;
  per_anchor.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    const Tensor anchor = row(student_reps, i);
    std::vector<Tensor> sims;
    sims.reserve(b);
    Tensor positive;
    for (std::size_t j = 0; j < b; ++j) {
      Tensor s = scalar_mul(cosine_similarity(anchor, row(teacher_reps, j)), inv_tau);
      if (j == i) positive = s;
      sims.push_back(std::move(s));
    }
    per_anchor.push_back(sub(logsumexp(concat_rows(sims)), positive));
  }
  return scalar_mul(sum_all(concat_rows(per_anchor)), 1.0 / static_cast<double>(b));
}

namespace {

Tensor bce_with_logits(const Tensor& logit, double label) {
  // softplus(x) - l*x, with softplus computed as logsumexp([0, x]).
  Tensor softplus = logsumexp(concat_rows({Tensor::scalar(0.0), logit}));
  return sub(softplus, scalar_mul(logit, label));
}

}  // namespace

Tensor supervised_loss(const Tensor& predictions, const std::vector<double>& labels,
                       TaskKind kind) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw Error(Errc::dim_mismatch, "predictions and labels differ in length");
  }
  const auto n = static_cast<double>(labels.size());
  if (kind == TaskKind::regression) {
    Tensor targets(predictions.shape(), labels);
    Tensor diff = sub(predictions, targets);
    return scalar_mul(sum_all(mul(diff, diff)), 1.0 / n);
  }
  // Classification: predictions are pre-sigmoid scores, one column per sample.
  if (predictions.cols() != 1 && labels.size() > 1) {
    throw Error(Errc::dim_mismatch, "classification predictions must be a column {n, 1}");
  }
  std::vector<Tensor> terms;
  terms.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw Error(Errc::label_out_of_domain, "classification labels must be 0 or 1");
    }
    terms.push_back(bce_with_logits(row(predictions, i), labels[i]));
  }
  return scalar_mul(sum_all(concat_rows(terms)), 1.0 / n);
}

Tensor combined_loss(const Tensor& sup, const Tensor& kd, double beta) {
  if (beta < 0.0 || beta > 1.0) {
    throw Error(Errc::beta_out_of_range, "beta must lie in [0, 1]");
  }
  return add(scalar_mul(sup, beta), scalar_mul(kd, 1.0 - beta));
}

Tensor apply_projection(const Tensor& teacher_reps, const Tensor& weight, const Tensor& bias) {
  return relu(add_rowvec(matmul(teacher_reps, weight), bias));
}

namespace {

Tensor head_forward(const Tensor& reps, const Tensor& w1, const Tensor& b1, const Tensor& w2,
                    const Tensor& b2) {
  Tensor hidden = relu(add_rowvec(matmul(reps, w1), b1));
  return add_rowvec(matmul(hidden, w2), b2);
}

/// Mean loss over present (sample, task) label entries; missing labels (NaN)
/// are masked out. Returns an empty tensor when nothing is present.
Tensor masked_supervised_loss(const Tensor& logits, const std::vector<const PropertyRecord*>& rows,
                              TaskKind kind) {
  std::vector<Tensor> terms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::vector<double>& labels = rows[i]->labels;
    Tensor logit_row = row(logits, i);
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (std::isnan(labels[t])) continue;
      // One-hot selector column extracts entry t differentiably.
      Tensor selector({labels.size(), std::size_t{1}});
      selector[t] = 1.0;
      Tensor entry = matmul(logit_row, selector);  // {1,1}
      if (kind == TaskKind::binary_classification) {
        if (labels[t] != 0.0 && labels[t] != 1.0) {
          throw Error(Errc::label_out_of_domain, "classification labels must be 0 or 1");
        }
        terms.push_back(bce_with_logits(entry, labels[t]));
      } else {
        Tensor diff = add_scalar(entry, -labels[t]);
        terms.push_back(mul(diff, diff));
      }
    }
  }
  if (terms.empty()) return Tensor();
  return scalar_mul(sum_all(concat_rows(terms)), 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

Tensor predict_scores(const Predictor& predictor, const MolGraph& g) {
  const Tensor rep = encode_graph(g, predictor.vocab, predictor.student);
  return head_forward(rep, predictor.head_w1, predictor.head_b1, predictor.head_w2,
                      predictor.head_b2);
}

double evaluate_predictor(const Predictor& predictor, const PropertyDataset& data,
                          const std::vector<std::size_t>& rows) {
  const std::size_t tasks = data.task_names.size();
  std::vector<std::vector<double>> scores(tasks);
  std::vector<std::vector<int>> bin_labels(tasks);
  std::vector<double> reg_preds, reg_labels;

  for (std::size_t r : rows) {
    const PropertyRecord& record = data.records[r];
    const Tensor s = predict_scores(predictor, record.molecule);
    for (std::size_t t = 0; t < tasks; ++t) {
      if (std::isnan(record.labels[t])) continue;
      if (data.task == TaskKind::binary_classification) {
        scores[t].push_back(s[t]);
        bin_labels[t].push_back(static_cast<int>(record.labels[t]));
      } else {
        reg_preds.push_back(s[t]);
        reg_labels.push_back(record.labels[t]);
      }
    }
  }

  if (data.task == TaskKind::regression) {
    return rmse(reg_preds, reg_labels);
  }
  double auc_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < tasks; ++t) {
    const bool has_pos = std::count(bin_labels[t].begin(), bin_labels[t].end(), 1) > 0;
    const bool has_neg = std::count(bin_labels[t].begin(), bin_labels[t].end(), 0) > 0;
    if (!has_pos || !has_neg) continue;  // single-class tasks carry no ranking signal
    auc_sum += auc_roc(scores[t], bin_labels[t]);
    ++counted;
  }
  if (counted == 0) {
    throw Error(Errc::single_class, "every task is single-class on this split");
  }
  return auc_sum / static_cast<double>(counted);
}

FinetuneResult finetune(const PropertyDataset& data, const std::vector<std::size_t>& train_idx,
                        const std::vector<std::size_t>& valid_idx, const EncoderParams& teacher,
                        const FeatureVocab& vocab, const DistillConfig& cfg) {
  cfg.validate();
  if (data.records.empty() || train_idx.empty()) {
    throw Error(Errc::empty_dataset, "fine-tuning needs a non-empty training split");
  }
  const std::size_t tasks = data.task_names.size();
  const auto d_in = static_cast<int>(vocab.total_dim());
  const auto d_out = static_cast<std::size_t>(cfg.student_dim);

  Predictor model;
  model.vocab = vocab;
  model.task = data.task;
  model.task_names = data.task_names;

  std::uint64_t rng = cfg.seed;
  std::vector<int> dims{d_in};
  for (int l = 1; l < cfg.layers; ++l) dims.push_back(cfg.student_hidden);
  dims.push_back(cfg.student_dim);
  model.student = init_encoder_params(cfg.arch, dims, cfg.hops, splitmix64(rng));
  if (cfg.init_from_teacher) {
    if (teacher.arch != cfg.arch || teacher.dims != model.student.dims ||
        teacher.hops != cfg.hops) {
      throw Error(Errc::bad_config, "teacher and student shapes differ; cannot copy weights");
    }
    model.student.weights = teacher.weights;
  }
  model.head_w1 = init_uniform(d_out, d_out, rng);
  model.head_b1 = Tensor({std::size_t{1}, d_out});
  model.head_w2 = init_uniform(d_out, tasks, rng);
  model.head_b2 = Tensor({std::size_t{1}, tasks});
  model.projection.weight =
      init_uniform(static_cast<std::size_t>(teacher.output_dim()), d_out, rng);
  model.projection.bias = Tensor({std::size_t{1}, d_out});

  const bool use_kd = !cfg.kd_disabled && cfg.beta < 1.0;

  // Frozen-teacher contract: representations are computed once, untracked.
  std::vector<Tensor> teacher_reps;
  if (use_kd) {
    teacher_reps.reserve(data.records.size());
    for (const PropertyRecord& r : data.records) {
      teacher_reps.push_back(encode_graph(r.molecule, vocab, teacher));
    }
  }

  auto gather_params = [&]() {
    std::vector<Tensor> params = model.student.weights;
    params.push_back(model.head_w1);
    params.push_back(model.head_b1);
    params.push_back(model.head_w2);
    params.push_back(model.head_b2);
    if (use_kd) {
      params.push_back(model.projection.weight);
      params.push_back(model.projection.bias);
    }
    return params;
  };
  auto scatter_params = [&](const std::vector<Tensor>& params) {
    std::size_t at = 0;
    for (Tensor& w : model.student.weights) w = params[at++];
    model.head_w1 = params[at++];
    model.head_b1 = params[at++];
    model.head_w2 = params[at++];
    model.head_b2 = params[at++];
    if (use_kd) {
      model.projection.weight = params[at++];
      model.projection.bias = params[at++];
    }
  };

  std::vector<Tensor> params = gather_params();
  AdamState adam(params, cfg.adam);

  FinetuneResult result;
  const bool higher_better = data.task == TaskKind::binary_classification;
  std::vector<std::size_t> order(train_idx);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = splitmix64(rng) % i;
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));

      Tape tape;
      std::vector<Tensor> tracked = tape.params(params);
      const std::size_t enc_count = model.student.weights.size();
      std::vector<Tensor> enc_weights(tracked.begin(),
                                      tracked.begin() + static_cast<long>(enc_count));
      const Tensor& w1 = tracked[enc_count];
      const Tensor& b1 = tracked[enc_count + 1];
      const Tensor& w2 = tracked[enc_count + 2];
      const Tensor& b2 = tracked[enc_count + 3];

      std::vector<const PropertyRecord*> rows;
      std::vector<Tensor> rep_rows;
      std::vector<Tensor> teacher_rows;
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t record_index = order[i];
        rows.push_back(&data.records[record_index]);
        rep_rows.push_back(
            encode_graph_with(data.records[record_index].molecule, vocab, model.student,
                              enc_weights));
        if (use_kd) teacher_rows.push_back(teacher_reps[record_index]);
      }
      Tensor student_reps = concat_rows(rep_rows);
      Tensor logits = head_forward(student_reps, w1, b1, w2, b2);
      Tensor sup = masked_supervised_loss(logits, rows, data.task);

      Tensor loss;
      if (use_kd) {
        Tensor projected = apply_projection(concat_rows(teacher_rows), tracked[enc_count + 4],
                                            tracked[enc_count + 5]);
        Tensor kd = infonce_kd_loss(student_reps, projected, cfg.temperature);
        loss = sup.size() == 0 ? kd : combined_loss(sup, kd, cfg.beta);
      } else {
        if (sup.size() == 0) continue;  // batch with no labels, nothing to learn from
        loss = sup;
      }

      loss_sum += loss.value();
      ++batches;
      tape.backward(loss);
      std::vector<Tensor> grads;
      grads.reserve(tracked.size());
      for (const Tensor& t : tracked) grads.push_back(tape.grad(t));
      adam_step(params, grads, adam);
      scatter_params(params);
    }
    result.epoch_train_loss.push_back(batches > 0 ? loss_sum / static_cast<double>(batches)
                                                  : 0.0);

    double metric;
    if (valid_idx.empty()) {
      metric = higher_better ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      metric = evaluate_predictor(model, data, valid_idx);
    }
    result.epoch_valid_metric.push_back(metric);
    const bool better = result.best_epoch < 0 ||
                        (higher_better ? metric > result.best_valid_metric
                                       : metric < result.best_valid_metric);
    if (better) {
      result.best_epoch = epoch;
      result.best_valid_metric = metric;
      result.predictor = model;
    }
  }

  if (result.best_epoch < 0) {
    result.predictor = model;  // epochs == 0: the seeded initialization
    result.best_valid_metric =
        valid_idx.empty() ? 0.0 : evaluate_predictor(model, data, valid_idx);
  }
  return result;
}

}  // namespace molkd
