#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molkd/chem.hpp"
#include "molkd/encoder.hpp"
#include "molkd/featurize.hpp"
#include "molkd/ndiff.hpp"

namespace molkd {

enum class TaskKind : std::uint8_t { binary_classification, regression };

std::string task_name(TaskKind kind);
TaskKind task_from_name(const std::string& name);

struct DistillConfig {
  double temperature = 0.1;  // grid {0.05, 0.075, 0.1}
  double beta = 0.5;         // grid {0.2, 0.5, 0.8}; 1 = supervised only
  TaskKind task = TaskKind::binary_classification;
  int student_dim = 64;
  int student_hidden = 64;
  int layers = 2;
  int hops = 3;
  Arch arch = Arch::TAG;
  int epochs = 60;
  int batch_size = 32;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  std::uint64_t seed = 1;
  bool kd_disabled = false;       // drop the distillation term entirely
  bool init_from_teacher = false; // copy teacher weights when shapes permit

  void validate() const;  // temperature > 0, beta in [0,1]
};

struct PropertyRecord {
  MolGraph molecule;           // hydrogen-explicit
  std::vector<double> labels;  // one per task; NaN = missing
};

struct PropertyDataset {
  std::vector<PropertyRecord> records;
  std::vector<std::string> task_names;
  TaskKind task = TaskKind::binary_classification;
};

/// In-batch contrastive distillation loss: for each anchor i the positive is
/// the teacher representation of the same molecule and the negatives are the
/// other teacher rows,
///   L = -(1/B) sum_i log( e^{cos(S_i,T_i)/tau} / sum_j e^{cos(S_i,T_j)/tau} ),
/// stabilized through logsumexp. B = 1 yields exactly 0.
Tensor infonce_kd_loss(const Tensor& student_reps, const Tensor& teacher_reps,
                       double temperature);

/// Binary cross-entropy with logits (classification; labels must be 0/1) or
/// mean squared error (regression), mean over the batch.
Tensor supervised_loss(const Tensor& predictions, const std::vector<double>& labels,
                       TaskKind kind);

/// beta * sup + (1 - beta) * kd.
Tensor combined_loss(const Tensor& sup, const Tensor& kd, double beta);

/// Linear-plus-relu map from teacher representation space to student space.
struct TeacherProjection {
  Tensor weight;  // {teacher_dim, student_dim}
  Tensor bias;    // {1, student_dim}
};

Tensor apply_projection(const Tensor& teacher_reps, const Tensor& weight, const Tensor& bias);

/// Student encoder plus the two-layer prediction head (and the projection it
/// was trained with, kept for persistence).
struct Predictor {
  EncoderParams student;
  FeatureVocab vocab;
  TaskKind task = TaskKind::binary_classification;
  std::vector<std::string> task_names;
  Tensor head_w1, head_b1;  // {d, d}, {1, d}
  Tensor head_w2, head_b2;  // {d, T}, {1, T}
  TeacherProjection projection;
};

/// Per-task scores for one molecule: logits for classification, raw values
/// for regression. Shape {1, T}.
Tensor predict_scores(const Predictor& predictor, const MolGraph& g);

struct FinetuneResult {
  Predictor predictor;  // best-validation weights
  std::vector<double> epoch_train_loss;
  std::vector<double> epoch_valid_metric;  // AUC-ROC (higher better) or RMSE (lower better)
  int best_epoch = -1;
  double best_valid_metric = 0.0;
};

/// Distillation fine-tuning: the teacher is frozen (its representations are
/// computed once, without gradients), the student, head, and projection are
/// Adam-trained on beta * L_sup + (1-beta) * L_KD. beta = 1 and kd_disabled
/// take the identical purely supervised code path. Deterministic per seed.
FinetuneResult finetune(const PropertyDataset& data, const std::vector<std::size_t>& train_idx,
                        const std::vector<std::size_t>& valid_idx, const EncoderParams& teacher,
                        const FeatureVocab& vocab, const DistillConfig& cfg);

/// Macro-averaged AUC-ROC over tasks (classification) or RMSE over all
/// present labels (regression) of a predictor on the given rows.
double evaluate_predictor(const Predictor& predictor, const PropertyDataset& data,
                          const std::vector<std::size_t>& rows);

}  // namespace molkd
