# Finite metric spaces, generators and loaders
