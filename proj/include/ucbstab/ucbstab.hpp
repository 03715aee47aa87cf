#ifndef UCBSTAB_UCBSTAB_HPP_
#define UCBSTAB_UCBSTAB_HPP_

#include "ucbstab/bandit.hpp"
#include "ucbstab/config.hpp"
#include "ucbstab/errors.hpp"
#include "ucbstab/harness.hpp"
#include "ucbstab/inference.hpp"
#include "ucbstab/policy.hpp"
#include "ucbstab/random.hpp"
#include "ucbstab/report_io.hpp"
#include "ucbstab/stability.hpp"

#endif  // UCBSTAB_UCBSTAB_HPP_
