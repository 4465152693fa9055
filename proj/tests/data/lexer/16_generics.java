Map<String, List<Integer>> m = new HashMap<>();
