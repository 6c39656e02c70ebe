#ifndef OPINF_OPINF_HPP
#define OPINF_OPINF_HPP

#include "opinf/config.hpp"
#include "opinf/error.hpp"
#include "opinf/io.hpp"
#include "opinf/nelder_mead.hpp"
#include "opinf/ode.hpp"
#include "opinf/oracle.hpp"
#include "opinf/pod.hpp"
#include "opinf/preprocess.hpp"
#include "opinf/quadform.hpp"
#include "opinf/regsearch.hpp"
#include "opinf/rom.hpp"
#include "opinf/solver.hpp"
#include "opinf/timederiv.hpp"

#endif  // OPINF_OPINF_HPP
