#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "authprof/corpus.hpp"
#include "authprof/ensemble.hpp"
#include "authprof/eval.hpp"
#include "authprof/features.hpp"
#include "authprof/linsvm.hpp"

namespace authprof {

// All formats are versioned UTF-8 text. Doubles are printed with 17
// significant digits so values round-trip exactly; terms and labels are
// backslash-escaped (\\, \n, \r, \t). Loading a file written by these
// functions reproduces the in-memory value bit for bit.

// Feature space: "authprof-space 1" header, scheme line, then one term
// per line; index = position.
void save_feature_space(const FeatureSpace& space, const std::filesystem::path& path);
FeatureSpace load_feature_space(const std::filesystem::path& path);

// Calibrated model: header, scheme of origin, dimension, label order,
// then per label bias, Platt (A, B) and the dense weight row.
void save_model(const CalibratedLinearModel& model, const FeatureScheme& scheme,
                const std::filesystem::path& path);
CalibratedLinearModel load_model(const std::filesystem::path& path, FeatureScheme* scheme = nullptr);

// Ensemble container: a directory with manifest.json plus one .space and
// one .model file per member.
void save_ensemble(const EnsembleModel& model, const std::map<FeatureScheme, double>& tuned_Cs,
                   const std::filesystem::path& dir);
EnsembleModel load_ensemble(const std::filesystem::path& dir);

// Tuning grid as a TSV table: scheme, C, per-fold accuracies, mean.
void save_tuning_report(const TuningReport& report, const std::filesystem::path& path);

// Prediction files: one attribute-only <author .../> element per author.
void write_prediction_file(const std::filesystem::path& path, const std::string& author_id,
                           const std::string& lang, const std::optional<std::string>& gender,
                           const std::optional<std::string>& variety);
PredictionSet load_predictions(const std::filesystem::path& dir);

std::string format_double(double value); // shortest exact form used everywhere

} // namespace authprof
