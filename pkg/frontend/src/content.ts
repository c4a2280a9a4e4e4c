// Static info-tab content and the vehicle selector's closed option sets.

export const ECO_TIP =
  "Tip: gentle acceleration, early braking, and eco mode trim fuel use on every trip.";

export const INFO_PARAGRAPHS = [
  "This probe watches your trips locally and estimates what each one costs " +
    "at the pump and emits as CO2, along with what eco-driving could save. " +
    "All figures are estimates from national averages and your vehicle class.",
  "Eco-driving basics: accelerate gently, anticipate stops instead of braking " +
    "late, keep to steady speeds, and use your car's eco mode if it has one. " +
    "Short cold-start trips burn the most fuel per mile.",
  "Deleting a trip: open the Trips tab and use the delete control on any " +
    "entry you consider private or irrelevant (a taxi ride, a friend driving). " +
    "Deleted trips leave every total immediately.",
  "Privacy: everything stays on this machine in one readable journal file. " +
    "Nothing is uploaded; the Research Log tab shows exactly what the study " +
    "sees, and you copy it out yourself.",
];

export const VEHICLE_CATEGORIES = [
  "small_car",
  "midsize_car",
  "large_car",
  "suv",
  "minivan",
  "truck",
  "station_wagon",
  "sports_car",
];

export const POWERTRAINS = ["ICE", "HEV"];
