// Frozen reference values for the statistics suite.
// Generated by tests/oracles/generate_reference.py (scipy 1.15, statsmodels 0.14).
// Do not edit by hand; rerun the generator instead.
#pragma once

namespace oracle {

// x, d1, d2, F_cdf(x; d1, d2)
inline constexpr double f_cdf_cases[][4] = {
  {3.0, 2.0, 10.0, 0.904632568359375},
  {0.5, 1.0, 1.0, 0.39182655203060734},
  {1.0, 7.0, 7.0, 0.5000000000000001},
  {2.5, 3.0, 17.0, 0.905717194921052},
  {10.0, 5.0, 2.0, 0.9066019560751851},
  {0.08, 4.0, 9.0, 0.013456939884212895},
  {4.75, 2.5, 11.5, 0.9741074949583669},
  {1.3333, 12.0, 40.0, 0.7612894068112328},
  {25.0, 1.0, 30.0, 0.999976703314533},
  {0.001, 6.0, 6.0, 9.955125720539054e-09}};

inline constexpr double sw_normal20[] = {10.609434, 7.920032, 11.500902, 11.881129, 6.09793, 7.395641, 10.255681, 9.367515, 9.966398, 8.293912, 11.758796, 11.555584, 10.132061, 12.254482, 10.935019, 8.281415, 10.737502, 8.082235, 11.756901, 9.900148};
inline constexpr double sw_normal20_W = 0.9343037511369509;
inline constexpr double sw_normal20_p = 0.1867884788571056;
inline constexpr double sw_expo20[] = {1.247386, 0.223576, 1.83797, 1.227086, 0.655796, 0.417087, 0.45332, 0.077077, 0.179632, 0.68532, 0.38868, 1.264207, 0.708491, 0.23793, 0.461088, 0.641557, 0.343833, 0.321911, 0.878915, 0.296947};
inline constexpr double sw_expo20_W = 0.879164338606033;
inline constexpr double sw_expo20_p = 0.01709126777428146;
inline constexpr double sw_normal60[] = {0.743254, 0.543154, -0.66551, 0.232161, 0.116686, 0.218689, 0.871429, 0.223596, 0.678914, 0.067579, 0.289119, 0.631288, -1.457156, -0.319671, -0.470373, -0.638878, -0.275142, 1.494941, -0.865831, 0.968278, -1.68287, -0.334885, 0.162753, 0.586222, 0.711227, 0.793347, -0.348725, -0.462352, 0.857976, -0.191304, -1.275686, -1.133287, -0.919452, 0.497161, 0.142426, 0.690485, -0.427253, 0.15854, 0.62559, -0.309347, 0.456775, -0.661926, -0.363054, -0.381738, -1.19584, 0.486972, -0.469402, 0.012494, 0.480747, 0.446531, 0.665385, -0.098485, -0.423298, -0.079718, -1.687334, -1.447112, -1.3227, -0.997247, 0.399774, -0.905479};
inline constexpr double sw_normal60_W = 0.968506565310283;
inline constexpr double sw_normal60_p = 0.12327180462699483;
inline constexpr double sw_normal8[] = {4.621837, 6.299228, 4.643736, 5.737516, 4.066382, 4.794562, 4.049978, 4.660967};
inline constexpr double sw_normal8_W = 0.8630259068737975;
inline constexpr double sw_normal8_p = 0.12868517608013114;

inline constexpr double lev_a[] = {0.840308, -1.72732, 0.434424, 0.237736, -0.59415, -1.446058, 0.07213, -0.529493};
inline constexpr double lev_b[] = {0.765352, 0.343704, 3.503558, -0.178711, -1.746995, 0.658551, 0.739993, 3.018375, 1.970222, 1.013742};
inline constexpr double lev_c[] = {4.189909, -3.766289, -2.119255, -2.979728, -1.369429, -4.330058, 1.705453, -0.866668, -4.612419, -3.246737, 0.740542, 2.31438};
inline constexpr double lev_W = 4.775584377002037;
inline constexpr double lev_p = 0.016758829869715223;

inline constexpr double welch_g1[] = {11.996731, 12.913862, 10.414409, 9.010462, 7.867954, 10.267711, 9.187059, 9.584643};
inline constexpr double welch_g2[] = {9.66371, 11.077627, 14.697941, 11.971146, 11.024095, 8.393039, 6.475951, 10.041076, 11.338652, 16.80379};
inline constexpr double welch_g3[] = {9.651373, 13.913698, 6.503522, 3.075281, 4.174416, 5.37387, 19.642349, 4.893067, 13.192446, 4.485364, 13.657865, 10.924755};
inline constexpr double welch_F = 0.7264523203945717;
inline constexpr double welch_df1 = 2.0;
inline constexpr double welch_df2 = 17.358909249355833;
inline constexpr double welch_p = 0.4977548586791415;

inline constexpr double an222_y[] = {1.400738, 1.579247, 1.235517, 1.165645, 1.427198, 1.105012, 0.536086, 1.304129, 0.204676, 0.427715, 1.093905, 1.014132, 1.863249, 1.241719, 1.782449, 2.717182, 1.493471, 2.025431, 0.559266, 0.926277, 0.594959, 2.058945, 1.439532, 2.362759};
inline constexpr int an222_levels[3] = {2, 2, 2};
inline constexpr int an222_reps = 3;
inline constexpr double an222_ss[] = {1.7992159164633743, 1.7682671076470435, 1.0848616599260406, 0.0009494251833749833, 1.1077610157903757, 0.49323151377604185, 0.084438342770041, 2.524677995900667};
inline constexpr double an222_df[] = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 16.0};
inline constexpr double an222_F[] = {11.402426254023814, 11.206289977688645, 6.875247689804632, 0.006016926894703055, 7.02037102609713, 3.1258260392931185, 0.5351230875835666, -1.0};
inline constexpr double an222_p[] = {0.003844199507065975, 0.004088098683822083, 0.018492175796310198, 0.9391327774644325, 0.017483513080901274, 0.09612136694546894, 0.475039413091743, -1.0};

inline constexpr double an324_y[] = {1.420516, 2.215849, 2.434833, 1.393816, 1.821218, 1.683569, 2.641836, 2.266361, 0.948131, -0.608395, 1.739929, 0.742141, 1.508227, 1.01806, 1.172541, 1.677866, 2.294708, 1.678482, 2.208328, 2.711419, 2.277796, 1.89137, 3.536989, 2.897661, 0.547796, 1.211568, 1.919441, 1.484079, 1.804522, 2.721983, 3.73835, 3.060121, 2.153842, 2.830996, 3.730341, 3.119994, 4.326801, 4.625725, 4.575826, 4.211891, 2.30859, 2.248527, 3.459288, 2.029252, 3.103032, 2.9971, 3.159591, 4.275861};
inline constexpr int an324_levels[3] = {3, 2, 4};
inline constexpr int an324_reps = 2;
inline constexpr double an324_ss[] = {26.71537386367586, 5.79808350717409, 13.776387219967487, 0.6993077770807915, 1.9970793459976324, 0.40644263757241744, 2.4299734514417115, 6.63584493823};
inline constexpr double an324_df[] = {2.0, 1.0, 3.0, 2.0, 6.0, 3.0, 6.0, 24.0};
inline constexpr double an324_F[] = {48.3110273594821, 20.970050606591652, 16.608449833539485, 1.2646005750712797, 1.2038131478884855, 0.48999654615899346, 1.4647560176955345, -1.0};
inline constexpr double an324_p[] = {3.849587850843703e-09, 0.00012104520846349547, 4.696620245477748e-06, 0.3005002437358465, 0.3382480473611528, 0.6925085253725558, 0.23227012128148222, -1.0};

}  // namespace oracle
