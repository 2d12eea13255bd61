// Trains one cartpole agent for a few epochs and prints the learning curve.

#include "lsmrl/lsmrl.hpp"

#include <fmt/format.h>

int main(int argc, char** argv)
{
    auto config = lsmrl::preset("cartpole");
    config.train.epochs = argc > 1 ? std::stoul(argv[1]) : 20;

    const auto run = lsmrl::train_seed(config, 1, [](const lsmrl::epoch_metrics& m) {
        fmt::print("epoch {:3}  eval reward {:6.1f}  epsilon {:.3f}\n", m.epoch, m.eval_reward, m.epsilon);
    });
    lsmrl::save_model(run.trained, "cartpole-model.json");
}
