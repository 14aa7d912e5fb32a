#include "ansfd/errors.hpp"

namespace ansfd {

WindowUnderflow::WindowUnderflow(std::size_t have, std::size_t need)
    : Error("history window holds " + std::to_string(have) + " samples, " + std::to_string(need) +
            " required"),
      have_(have),
      need_(need) {}

DivergenceError::DivergenceError(std::size_t step_index)
    : Error("solution diverged at step " + std::to_string(step_index)), step_index_(step_index) {}

DivergenceError::DivergenceError(std::size_t step_index, const std::string& context)
    : Error(context + ": solution diverged at step " + std::to_string(step_index)),
      step_index_(step_index) {}

}  // namespace ansfd
