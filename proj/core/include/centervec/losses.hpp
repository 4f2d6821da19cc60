#pragma once

#include "centervec/raster.hpp"

namespace cvec {

/// One loss input: per-pixel targets and predictions plus the validity mask
/// selecting which pixels contribute. Mask losses expect binary targets;
/// the displacement loss takes real ones.
struct LossTensors {
    ScalarField targets;
    ScalarField predictions;
    BinaryMask validity;
};

/// Balancing weights of the combined objective.
struct LossWeights {
    double alpha = 10.0;  ///< cross-entropy weight
    double beta = 10.0;   ///< soft-IoU weight
    double gamma = 1.0;   ///< mean-square (displacement) weight
};

/// Scalar loss value with its per-pixel gradient with respect to the
/// predictions. The gradient is zero wherever validity is false.
struct LossValueAndGrad {
    double value = 0.0;
    ScalarField grad;
};

enum class MsReduction { sum, mean };

/// Binary cross entropy, negated so it is minimized at perfect prediction:
/// value = -sum_valid [y log p + (1-y) log(1-p)], with predictions clamped
/// into [1e-7, 1 - 1e-7] before the logs.
LossValueAndGrad ce_loss(const LossTensors& t);

/// Soft-IoU loss for one mask: 1 - I/U with I = sum(y*p) and
/// U = sum(y) + sum(p) - I over valid pixels, denominator guarded by 1e-7.
LossValueAndGrad iou_loss(const LossTensors& t);

/// Squared-error loss over valid pixels, summed by default.
LossValueAndGrad ms_loss(const LossTensors& t, MsReduction reduction = MsReduction::sum);

/// Combined objective and its per-field breakdown. Cross entropy and soft
/// IoU run over both the inside and center masks; the squared-error term
/// runs over both displacement channels.
struct TotalLoss {
    double value = 0.0;
    double ce_total = 0.0;   ///< ce(inside) + ce(center), unweighted
    double iou_total = 0.0;  ///< iou(inside) + iou(center), unweighted
    double ms_total = 0.0;   ///< ms(dx) + ms(dy), unweighted
    ScalarField grad_inside;
    ScalarField grad_center;
    ScalarField grad_cvx;
    ScalarField grad_cvy;
};

/// value = alpha*(ce_in + ce_cn) + beta*(iou_in + iou_cn) + gamma*(ms_x + ms_y);
/// gradients scale and add the same way. Gradients are with respect to raw
/// probabilities / displacements, not logits.
TotalLoss total_loss(const LossTensors& inside, const LossTensors& center,
                     const LossTensors& cvx, const LossTensors& cvy,
                     const LossWeights& w);

}  // namespace cvec
