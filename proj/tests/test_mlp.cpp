#include <doctest.h>

#include <cmath>

#include "nids/classifier.hpp"
#include "nids/mlp.hpp"
#include "nids/rng.hpp"

using namespace nids;

TEST_SUITE("mlp") {

TEST_CASE("mlp_forward: identity, relu clamp, hand arithmetic") {
    MlpLayerState ident{2, 2, {1, 0, 0, 1}, {0, 0}, "identity"};
    std::vector<double> x{3.5, -2};
    CHECK(mlp_forward(ident, x) == std::vector<double>{3.5, -2});

    MlpLayerState relu{2, 2, {1, 0, 0, 1}, {0, 0}, "relu"};
    std::vector<double> neg{-1, -7};
    CHECK(mlp_forward(relu, neg) == std::vector<double>{0, 0});

    // W = [[1,2],[3,4]], b = [1,-1], x = [1,1] -> [4, 6]
    MlpLayerState hand{2, 2, {1, 2, 3, 4}, {1, -1}, "identity"};
    std::vector<double> ones{1, 1};
    auto out = mlp_forward(hand, ones);
    CHECK(out[0] == doctest::Approx(4.0));
    CHECK(out[1] == doctest::Approx(6.0));

    CHECK_THROWS_AS(mlp_forward(hand, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("analytic gradients match central finite differences on a 2-3-3-2 network") {
    // 10 seeded parameter points; smooth activations keep differences valid.
    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::uint64_t point = 1; point <= 10; ++point) {
        MlpNet net = MlpNet::create({2, 3, 3, 2}, "sigmoid", point);
        Rng rng(derive_seed(point, "gradcheck_data"));
        const std::size_t batch_n = 8;
        std::vector<double> x(batch_n * 2);
        std::vector<std::int32_t> y(batch_n);
        for (std::size_t i = 0; i < batch_n; ++i) {
            x[i * 2] = rng.uniform() * 2 - 1;
            x[i * 2 + 1] = rng.uniform() * 2 - 1;
            y[i] = static_cast<std::int32_t>(rng.bounded(2));
        }
        std::vector<std::size_t> batch(batch_n);
        for (std::size_t i = 0; i < batch_n; ++i) batch[i] = i;

        MlpGrad grad;
        net.loss_and_grad(x, y, 2, batch, grad);

        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            auto check_param = [&](double& param, double analytic) {
                const double save = param;
                param = save + h;
                double up = net.loss(x, y, 2, batch);
                param = save - h;
                double down = net.loss(x, y, 2, batch);
                param = save;
                double numeric = (up - down) / (2 * h);
                double rel = std::abs(analytic - numeric) /
                             std::max({std::abs(analytic), std::abs(numeric), 1e-6});
                max_rel = std::max(max_rel, rel);
            };
            for (std::size_t i = 0; i < net.layers[l].w.size(); ++i) {
                check_param(net.layers[l].w[i], grad.w[l][i]);
            }
            for (std::size_t i = 0; i < net.layers[l].b.size(); ++i) {
                check_param(net.layers[l].b[i], grad.b[l][i]);
            }
        }
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("a 4-hidden-unit ann learns xor exactly") {
    Schema s{{"f0", "f1"}, "label"};
    std::vector<FlowRecord> recs{
        {{0, 0}, "a"}, {{0, 1}, "b"}, {{1, 0}, "b"}, {{1, 1}, "a"}};
    Dataset d(s, recs, "xor");
    ClassifierSpec spec = ClassifierSpec::make(Family::ann,
                                               {{"hidden_width", "4"},
                                                {"epochs", "3000"},
                                                {"batch_size", "4"},
                                                {"learning_rate", "0.5"},
                                                {"activation", "sigmoid"}},
                                               1);
    TrainedModel model = fit(spec, d);
    for (const auto& r : recs) CHECK(predict(model, r) == r.label);
}

TEST_CASE("ann has one hidden layer, dnn has three") {
    Schema s{{"f0"}, "label"};
    std::vector<FlowRecord> recs{{{0}, "a"}, {{1}, "b"}, {{0.2}, "a"}, {{0.9}, "b"}};
    Dataset d(s, recs, "t");
    auto hp = std::map<std::string, std::string>{{"epochs", "2"}, {"hidden_width", "3"}};
    TrainedModel ann = fit(ClassifierSpec::make(Family::ann, hp), d);
    TrainedModel dnn = fit(ClassifierSpec::make(Family::dnn, hp), d);
    CHECK(ann.mlp->layers.size() == 2);  // hidden + output
    CHECK(dnn.mlp->layers.size() == 4);  // 3 hidden + output
    CHECK(ann.mlp->layers.back().activation == "softmax");
    for (const auto& layer : dnn.mlp->layers) {
        if (&layer != &dnn.mlp->layers.back()) CHECK(layer.activation == "relu");
    }
}

} // TEST_SUITE
