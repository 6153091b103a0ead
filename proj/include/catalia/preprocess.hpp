#pragma once

#include "catalia/ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace catalia {

struct PreprocessReport {
    std::size_t eliminated_selectors = 0;
    std::size_t eliminated_testers = 0;
    std::vector<std::string> diseq_predicates;
    /// ADT sort name -> admissibility predicate name.
    std::map<std::string, std::string> admissibility_preds;
    std::size_t fresh_var_count = 0;

    [[nodiscard]] std::string to_string() const;
};

struct PreprocessResult {
    ChcSystem system;
    PreprocessReport report;
};

[[nodiscard]] std::string admissibility_pred_name(const std::string& adt);
[[nodiscard]] std::string diseq_pred_name(const std::string& adt);
[[nodiscard]] bool is_admissibility_pred(std::string_view pred);

/// Replaces selector applications and testers by per-constructor case splits.
PreprocessResult eliminate_selectors_testers(const ChcSystem& sys);
/// Replaces ADT disequalities by atoms of fresh inductively defined predicates.
PreprocessResult encode_adt_disequality(const ChcSystem& sys);
/// Adds an admissibility atom for every ADT variable plus one defining clause per constructor.
PreprocessResult augment_admissibility(const ChcSystem& sys);

/// All three stages in order; admissibility augmentation can be switched off for debugging.
PreprocessResult preprocess(const ChcSystem& sys, bool admissibility = true);

} // namespace catalia
