#pragma once

#include "parcelca/parcel.hpp"

#include <vector>

namespace parcelca {

enum class AssessMode { Area, Count };

/// Change-prediction buckets. A: missed change; B: hit (right category);
/// C: hit change, wrong category; D: false alarm.
struct ConfusionAreas {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double total() const { return a + b + c + d; }
};

struct AccuracyReport {
    double fom = 0.0;
    double pa = 0.0;
    double ua = 0.0;
    ConfusionAreas confusion;
    AssessMode mode = AssessMode::Area;
};

/// Assigns each cell the reference category with the largest area overlap.
/// Ties break toward the smaller category id; zero overlap is an error
/// naming the offending cells.
std::vector<int> label_overlay(const Landscape& cells, const Landscape& reference);

/// Buckets cells into A/B/C/D given initial, simulated and actual per-cell
/// categories. Cells that change nowhere contribute to no bucket.
ConfusionAreas categorize(const std::vector<int>& initial, const std::vector<int>& simulated,
                          const std::vector<int>& actual, const std::vector<double>& areas,
                          AssessMode mode = AssessMode::Area);

/// FoM = B/(A+B+C+D), PA = B/(A+B+C), UA = B/(B+C+D); a zero denominator
/// yields 0 for that metric.
AccuracyReport figure_of_merit(const ConfusionAreas& c, AssessMode mode = AssessMode::Area);

} // namespace parcelca
