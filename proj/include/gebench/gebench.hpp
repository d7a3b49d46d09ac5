#pragma once

#include "gebench/attitude_estimation.hpp"
#include "gebench/bench_dynamics.hpp"
#include "gebench/csv.hpp"
#include "gebench/flight_control.hpp"
#include "gebench/ge_models.hpp"
#include "gebench/ipt_link.hpp"
#include "gebench/model_identification.hpp"
#include "gebench/motor_propeller.hpp"
#include "gebench/scenario.hpp"
#include "gebench/scenario_yaml.hpp"
#include "gebench/simulation.hpp"
#include "gebench/units.hpp"
