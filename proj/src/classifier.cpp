#include "classifier.hpp"

#include <limits>

#include "error.hpp"

namespace purelab {

Classifier Classifier::nearest_centroid(std::vector<Vec> centers, std::vector<int> labels) {
    if (centers.empty() || centers.size() != labels.size())
        throw_invalid("nearest_centroid needs matching nonempty centers and labels");
    Classifier c;
    c.kind_ = Kind::NearestCentroid;
    c.centers_ = std::move(centers);
    c.labels_ = std::move(labels);
    return c;
}

Classifier Classifier::logistic(Vec weights, double bias, int label_neg, int label_pos) {
    if (weights.empty()) throw_invalid("logistic classifier needs weights");
    Classifier c;
    c.kind_ = Kind::Logistic;
    c.weights_ = std::move(weights);
    c.bias_ = bias;
    c.labels_ = {label_neg, label_pos};
    return c;
}

Classifier Classifier::mlp_argmax(std::shared_ptr<const Mlp> net, std::vector<int> labels) {
    if (!net) throw_invalid("mlp classifier needs a network");
    if (static_cast<int>(labels.size()) != net->out_dim())
        throw_invalid("mlp classifier: one label per output logit required");
    Classifier c;
    c.kind_ = Kind::MlpArgmax;
    c.net_ = std::move(net);
    c.labels_ = std::move(labels);
    return c;
}

int Classifier::classify(std::span<const double> x) const {
    switch (kind_) {
        case Kind::NearestCentroid: {
            if (x.size() != centers_.front().size())
                throw_domain("classifier: input dimension mismatch");
            double best_d = std::numeric_limits<double>::infinity();
            int best_label = labels_.front();
            for (std::size_t k = 0; k < centers_.size(); ++k) {
                const double d = squared_distance(x, centers_[k]);
                if (d < best_d || (d == best_d && labels_[k] < best_label)) {
                    best_d = d;
                    best_label = labels_[k];
                }
            }
            return best_label;
        }
        case Kind::Logistic: {
            if (x.size() != weights_.size()) throw_domain("classifier: input dimension mismatch");
            return dot(x, weights_) + bias_ > 0.0 ? labels_[1] : labels_[0];
        }
        case Kind::MlpArgmax: {
            Vec logits(net_->out_dim());
            net_->forward_one(x, logits);
            int best = 0;
            for (int i = 1; i < net_->out_dim(); ++i) {
                if (logits[i] > logits[best] ||
                    (logits[i] == logits[best] && labels_[i] < labels_[best]))
                    best = i;
            }
            return labels_[best];
        }
    }
    throw_invalid("unknown classifier kind");
}

}  // namespace purelab
