#include "centervec/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvec {

namespace {

constexpr double kEps = 1e-7;

void validate_tensors(const LossTensors& t, bool binary_targets) {
    if (!(t.targets.shape() == t.predictions.shape()) ||
        !(t.targets.shape() == t.validity.shape())) {
        throw std::invalid_argument("loss tensors must share one shape");
    }
    for (std::int64_t i = 0; i < t.targets.size(); ++i) {
        if (std::isnan(t.targets[i]) || std::isnan(t.predictions[i])) {
            throw std::invalid_argument("loss tensors contain NaN");
        }
        if (binary_targets && t.validity[i] && t.targets[i] != 0.0 && t.targets[i] != 1.0) {
            throw std::invalid_argument("mask loss targets must be exactly 0 or 1");
        }
    }
}

}  // namespace

LossValueAndGrad ce_loss(const LossTensors& t) {
    validate_tensors(t, /*binary_targets=*/true);
    LossValueAndGrad out;
    out.grad = ScalarField(t.targets.shape(), 0.0);
    double value = 0.0;
    for (std::int64_t i = 0; i < t.targets.size(); ++i) {
        if (!t.validity[i]) continue;
        const double y = t.targets[i];
        const double p = std::clamp(t.predictions[i], kEps, 1.0 - kEps);
        value -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        out.grad[i] = -(y / p - (1.0 - y) / (1.0 - p));
    }
    out.value = value;
    return out;
}

LossValueAndGrad iou_loss(const LossTensors& t) {
    validate_tensors(t, /*binary_targets=*/true);
    double inter = 0.0;
    double sum_y = 0.0;
    double sum_p = 0.0;
    for (std::int64_t i = 0; i < t.targets.size(); ++i) {
        if (!t.validity[i]) continue;
        const double y = t.targets[i];
        const double p = t.predictions[i];
        inter += y * p;
        sum_y += y;
        sum_p += p;
    }
    const double uni = std::max(sum_y + sum_p - inter, kEps);

    LossValueAndGrad out;
    out.value = 1.0 - inter / uni;
    out.grad = ScalarField(t.targets.shape(), 0.0);
    for (std::int64_t i = 0; i < t.targets.size(); ++i) {
        if (!t.validity[i]) continue;
        const double y = t.targets[i];
        // dI/dp = y, dU/dp = 1 - y; quotient rule on -I/U.
        out.grad[i] = -(y * uni - inter * (1.0 - y)) / (uni * uni);
    }
    return out;
}

LossValueAndGrad ms_loss(const LossTensors& t, MsReduction reduction) {
    validate_tensors(t, /*binary_targets=*/false);
    LossValueAndGrad out;
    out.grad = ScalarField(t.targets.shape(), 0.0);
    double value = 0.0;
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < t.targets.size(); ++i) {
        if (!t.validity[i]) continue;
        const double diff = t.predictions[i] - t.targets[i];
        value += diff * diff;
        out.grad[i] = 2.0 * diff;
        ++n;
    }
    if (reduction == MsReduction::mean && n > 0) {
        value /= static_cast<double>(n);
        for (std::int64_t i = 0; i < out.grad.size(); ++i) {
            out.grad[i] /= static_cast<double>(n);
        }
    }
    out.value = value;
    return out;
}

TotalLoss total_loss(const LossTensors& inside, const LossTensors& center,
                     const LossTensors& cvx, const LossTensors& cvy,
                     const LossWeights& w) {
    if (!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0)) {
        throw std::invalid_argument("loss weights must be >= 0");
    }

    const LossValueAndGrad ce_in = ce_loss(inside);
    const LossValueAndGrad ce_cn = ce_loss(center);
    const LossValueAndGrad iou_in = iou_loss(inside);
    const LossValueAndGrad iou_cn = iou_loss(center);
    const LossValueAndGrad ms_x = ms_loss(cvx);
    const LossValueAndGrad ms_y = ms_loss(cvy);

    TotalLoss out;
    out.ce_total = ce_in.value + ce_cn.value;
    out.iou_total = iou_in.value + iou_cn.value;
    out.ms_total = ms_x.value + ms_y.value;
    out.value = w.alpha * out.ce_total + w.beta * out.iou_total + w.gamma * out.ms_total;

    auto combine = [](const ScalarField& a, double wa, const ScalarField& b, double wb) {
        ScalarField g(a.shape(), 0.0);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            g[i] = wa * a[i] + wb * b[i];
        }
        return g;
    };
    out.grad_inside = combine(ce_in.grad, w.alpha, iou_in.grad, w.beta);
    out.grad_center = combine(ce_cn.grad, w.alpha, iou_cn.grad, w.beta);
    out.grad_cvx = ScalarField(cvx.targets.shape(), 0.0);
    out.grad_cvy = ScalarField(cvy.targets.shape(), 0.0);
    for (std::int64_t i = 0; i < out.grad_cvx.size(); ++i) {
        out.grad_cvx[i] = w.gamma * ms_x.grad[i];
    }
    for (std::int64_t i = 0; i < out.grad_cvy.size(); ++i) {
        out.grad_cvy[i] = w.gamma * ms_y.grad[i];
    }
    return out;
}

}  // namespace cvec
